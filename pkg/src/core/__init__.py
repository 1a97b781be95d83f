# core package: schemas, config, errors, and constants
