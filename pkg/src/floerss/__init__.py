"""floerss: computable index theory and spectral sequences for cleanly
intersecting Lagrangian pairs.

Modules:
  symplin   symplectic linear algebra, frames, fundamental solutions
  lagpath   Lagrangian paths, crossing forms, RS / Maslov / Viterbo indices
  spectrum  boundary-operator spectra, spectral gaps, Fredholm indices
  novikov   exact Laurent/Z/Z2 algebra, Smith forms, graded homology
  chain     Morse and pearl complexes with the data-validity gates
  specseq   filtered complexes, E^r pages, Novikov and action filtrations
  obstruct  displaceability verdicts and quantum case analysis
  orsign    finite-dimensional orientation sign calculus
  cli       the floerss command-line tool (JSON schema floerss/1)
"""

__version__ = "0.1.0"
