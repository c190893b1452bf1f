# Command-line help texts for the systolizer CLI

CLI_DESCRIPTION = """
Build balls in Coxeter complexes, systolize them, and verify the result.

Pipelines are deterministic: the same flags and seed give byte-identical
output files. Check commands exit 0 when every report passes, 1 when a
report carries violations and 2 on invalid input or ineligible types.
"""

BUILD_HELP = """
Enumerate the ball of the given radius around the identity chamber and write
it as canonical JSON. Rank 3 exponents are given as l,k,m and the vertex types
are named 2, k, m by stabilizer order; rank 4 exponents are the six labels
ab,ac,ad,bc,bd,cd. Use "inf" for an infinite exponent.
"""

SYSTOLIZE_HELP = """
Add the friend (and, in rank 4, acquaintance) edges to a ball. Excluded
triangle types are refused unless --force is given. With --davis the face
complex of the systolization is written instead, with the open stars of
infinite-stabilizer vertices removed in rank 4.
"""

CHECK_HELP = """
Run verification suites on a complex file:
  structural  proved statements about the unsystolized ball (violations are build bugs)
  links       every interior vertex link is k-large
  edges       every interior edge link has the expected largeness (rank 4)
  oracles     randomized lemma oracles on small graphs
  all         every suite that applies to the input
"""

EXPORT_HELP = """
Write a complex as canonical JSON, as a DOT graph (vertices coloured by type,
edges styled by origin) or as an interactive Plotly HTML figure.
"""

ORACLE_HELP = """
Run the randomized amalgam, collapse, clique-graph and incidence-graph
oracles plus the face-complex oracle, all from one seeded generator.
"""
