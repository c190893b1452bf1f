# Pipeline configuration, errors and output formatting
