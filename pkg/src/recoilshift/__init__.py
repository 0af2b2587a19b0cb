"""Recoil shift of Ramsey fringes for cold-atom clouds modelled as Gaussian packet ensembles."""
