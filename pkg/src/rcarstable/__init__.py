"""Random-coefficient autoregression driven by Poisson arrival ratios."""
