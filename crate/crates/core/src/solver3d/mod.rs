//! Ritz–Galerkin minimization of the scaled total potential `Π^ε` on the
//! cylinder `ω × (0, L)`, clamped at `x3 = 0`.

mod assemble;
mod basis;
mod field;

pub use assemble::{
    assemble, form_gram, load_vector, solve_min, AssembledSystem, EnergyOperator, Measure,
    NormGrams, QuadForm, Solution, SolveDiagnostics, CONDITION_LIMIT,
};
pub use basis::{InPlaneMode, ModeJet, RitzBasis3D};
pub use field::{
    embed_timoshenko, evaluate_solution, norms, project, real_problem_energy,
    DisplacementField3D, FieldNorms, PointEvaluation, RealEnergyCheck,
};
