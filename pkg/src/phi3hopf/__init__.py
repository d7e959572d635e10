"""Hopf-algebraic renormalization toolkit for scalar phi^3 theory.

The package is organized in layers:

* :mod:`phi3hopf.ring` -- exact multivariate polynomials over the rationals,
  the coefficient ring used everywhere in the symbolic layer.
* :mod:`phi3hopf.series` -- truncated formal power series, the groups of
  invertible series and formal diffeomorphisms, their semidirect product,
  and the Dyson transform between bare and renormalized Green's functions.
* :mod:`phi3hopf.hopf` -- graded connected commutative Hopf algebras
  (unshuffle, symmetric functions, Faa di Bruno, SL2/GL2 coordinate rings),
  characters and convolution.
* :mod:`phi3hopf.graphs` -- half-edge Feynman graphs for the cubic scalar
  interaction: canonical forms, automorphisms, symmetry factors, power
  counting, 1PI tests, subgraph families and contraction.
* :mod:`phi3hopf.greens` -- tree and graph expansions of classical and
  quantum Green's functions with exact hbar/lambda/Sym bookkeeping.
* :mod:`phi3hopf.integrand` / :mod:`phi3hopf.routing` -- momentum routing
  and symbolic integrands with exact Taylor expansion in external momenta.
* :mod:`phi3hopf.bphz` -- the Bogoliubov/BPHZ subtraction: prepared terms,
  counterterms, renormalized amplitudes under a sharp momentum cutoff, the
  convolution identity check and Rota-Baxter models.
* :mod:`phi3hopf.ckhopf` -- the Connes-Kreimer Hopf algebra on 1PI graphs,
  Z-factor series, the inclusion of formal diffeomorphisms and the
  projection back onto ordinary series.
* :mod:`phi3hopf.cli` -- batch command line interface.
"""

__version__ = "0.1.0"
