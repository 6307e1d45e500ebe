namespace opd {}
