//! Degree-divisibility machinery behind typical boundedness of torsion.
//!
//! * [`arith`]: totients, `phi`-preimages, `#GL_m(Z/p^n)`, Minkowski's bound.
//! * [`gl2`]: subgroups of `GL_2(F_p)` and their Dickson case.
//! * [`orbits`]: orbit sizes on `F_p^2 \ {0}` and the divisibility checks.
//! * [`curvedeg`]: genus of `X_1(N)`, Riemann-Roch thresholds, numerical semigroups.
//! * [`families`]: density sieves and the bounded-exponent procedure.
//! * [`cmbounds`]: the CM divisibility constant `c(g)`.
//! * [`cli`]: the `degdiv` command line.

pub mod arith;
pub mod cli;
pub mod cmbounds;
pub mod curvedeg;
pub mod families;
pub mod gl2;
pub mod orbits;
