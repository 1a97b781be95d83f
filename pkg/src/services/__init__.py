# services package: suites, figures, sampling and the vanishing experiment
