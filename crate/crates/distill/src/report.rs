//! JSON renderings of pipeline results.

use distill_core::automata::Lasso;
use distill_core::decide::{Classification, ReducedEmptiness, Verdict};
use distill_core::reduce::{DimensionStatus, ReducedInstance};
use distill_core::spectra::{SpectralProfile, ValidationReport};
use serde_json::{json, Map, Value};

use crate::doc::{rational_string, rational_value, vector_value};

pub fn profile(p: &SpectralProfile) -> Value {
    let cyclo: Map<String, Value> = p
        .cyclo_factors
        .iter()
        .map(|(d, m)| (d.to_string(), (*m).into()))
        .collect();
    json!({
        "charpoly": vector_value(p.charpoly.coeffs()),
        "zero_mult": p.zero_mult,
        "cyclo_factors": cyclo,
        "period_c": p.period_c,
        "dyn_dim": p.dyn_dim,
    })
}

pub fn validation(r: &ValidationReport) -> Value {
    let simplicity: Vec<Value> = r
        .simplicity
        .iter()
        .map(|s| {
            json!({
                "order": s.order,
                "algebraic": s.algebraic,
                "geometric": s.geometric,
                "passed": s.passed(),
            })
        })
        .collect();
    json!({
        "passed": r.passed(),
        "unit_eigenvalue": r.unit_eigenvalue,
        "simplicity": simplicity,
        "remainder": vector_value(r.remainder.coeffs()),
        "remainder_decay": r.remainder_decay.as_ref().map(|(m, norm)| json!({
            "block_m": m,
            "norm": rational_string(norm),
        })),
    })
}

fn status_name(s: DimensionStatus) -> &'static str {
    match s {
        DimensionStatus::Certified => "certified",
        DimensionStatus::NotCertified => "not-certified",
        DimensionStatus::Empty => "empty",
    }
}

pub fn certificate(red: &ReducedInstance) -> Value {
    let cert = &red.certificate;
    let dims: Vec<Value> = cert
        .dimensions
        .iter()
        .map(|d| {
            json!({
                "target": d.target,
                "residue": d.residue,
                "before": d.before,
                "after": d.after,
                "status": status_name(d.status),
            })
        })
        .collect();
    json!({
        "ell": cert.ell,
        "c": cert.c,
        "n0": cert.n0,
        "h": cert.h,
        "dyn_dim": cert.dyn_dim,
        "prefix_len": cert.prefix_len(),
        "prefix_letters": cert.prefix_letters,
        "stationary": vector_value(&red.s),
        "eps_sq": rational_value(&red.eps_sq),
        "decay": {
            "block_m": red.decay.block_m,
            "block_norm": rational_string(&red.decay.block_norm),
            "prefix_bound": rational_string(&red.decay.prefix_bound),
            "n0": red.decay.n0,
        },
        "hull_miss": red.hull_miss,
        "dimensions": dims,
    })
}

fn emptiness_name(e: ReducedEmptiness) -> &'static str {
    match e {
        ReducedEmptiness::Empty => "empty",
        ReducedEmptiness::NonEmpty => "nonempty",
        ReducedEmptiness::Unknown => "unknown",
    }
}

pub fn classification(c: &Classification) -> Value {
    let targets: Vec<Value> = c
        .targets
        .iter()
        .map(|t| {
            json!({
                "linear_dim_bound": t.linear_dim_bound,
                "intrinsic_dim": t.intrinsic_dim,
                "markov_low_dimensional": t.markov_low_dimensional,
                "emptiness": emptiness_name(t.emptiness),
            })
        })
        .collect();
    let note = if c.tame_applicable {
        "decidable: the reduced instance lies in a decidable LDS class; an external LDS procedure is required"
    } else {
        "not settled: the reduced instance is outside the known decidable LDS classes"
    };
    json!({
        "dyn_dim": c.dyn_dim,
        "tame_applicable": c.tame_applicable,
        "targets": targets,
        "note": note,
    })
}

pub fn lasso(l: &Lasso) -> Value {
    json!({"prefix": l.prefix, "cycle": l.cycle})
}

pub fn verdict(v: &Verdict) -> Value {
    match v {
        Verdict::Accept { evidence } | Verdict::Reject { evidence } => json!({
            "result": v.label(),
            "evidence": lasso(evidence),
        }),
        Verdict::ReducedOnly(c) => json!({
            "result": v.label(),
            "classification": classification(c),
        }),
    }
}
