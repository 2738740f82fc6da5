//! Runs a validated plan: expansions, recipes, and the final bound.

use std::collections::BTreeMap;

use crate::ingest::{report_lower_bound, Plan, PlannedKind};
use crate::linsys::{
    basis_match, kernel_vanishing, proportionality, solve_bound, BoundReport, Constraint,
    KernelOutcome, LinsysError, Refusal,
};
use crate::operators::{al_scalar_wl, fricke_combined, fricke_factor, ALContext, OperatorError};
use crate::restrict::{default_jmax, restrict_expansion, SymbolicQExp};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Linsys(#[from] LinsysError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// The expansion for each sending matrix used by a recipe, long enough for every range.
pub fn plan_expansions(plan: &Plan) -> BTreeMap<usize, SymbolicQExp> {
    let mut need: BTreeMap<usize, u32> = BTreeMap::new();
    for r in &plan.recipes {
        let base = plan.config.jmax.unwrap_or_else(|| default_jmax(&plan.det, &r.s));
        let e = need.entry(r.s_index).or_insert(base);
        *e = (*e).max(base).max(r.jrange[1]);
    }
    need.into_iter()
        .map(|(i, jmax)| {
            let s = plan.config.sending_matrices[i];
            (i, restrict_expansion(&plan.det, &s, Some(jmax)))
        })
        .collect()
}

/// Evaluates every recipe in order and solves the resulting system.
///
/// A refused kernel recipe contributes no rows; the bound from the remaining
/// rows is still valid and the refusal is listed in the report.
pub fn run_plan(plan: &Plan) -> Result<BoundReport, PipelineError> {
    let exps = plan_expansions(plan);
    let mut rows: Vec<Constraint> = Vec::new();
    let mut refusals = Vec::new();
    for r in &plan.recipes {
        let exp = &exps[&r.s_index];
        let range = r.jrange[0]..=r.jrange[1];
        match &r.kind {
            PlannedKind::Kernel { operator, eigenvalue } => {
                match kernel_vanishing(exp, operator, eigenvalue, range, &r.label)? {
                    KernelOutcome::Constraints(c) => rows.extend(c),
                    KernelOutcome::Refused { nullity } => refusals.push(Refusal {
                        recipe: r.label.clone(),
                        eigenvalue: eigenvalue.clone(),
                        nullity,
                    }),
                }
            }
            PlannedKind::Basis { basis } => rows.extend(basis_match(exp, basis, range, &r.label)?),
            PlannedKind::Fricke => {
                let ctx = ALContext::new(plan.config.level, plan.config.weight, plan.character.clone(), r.s)?;
                // Both sides are multiples of the same restricted expansion.
                let lhs = exp.scale(&fricke_factor(&ctx).value);
                let rhs = exp.scale(&al_scalar_wl(&ctx)?.value);
                let c = fricke_combined(&ctx)?.value;
                rows.extend(proportionality(&lhs, &rhs, &c, range, &r.label)?);
            }
        }
    }
    let mut report = solve_bound(&rows, &plan.det, plan.character.label())
        .with_lower_bound(report_lower_bound(&plan.config))
        .with_reference(plan.config.reference_upper_bound);
    report.refusals = refusals;
    Ok(report)
}
