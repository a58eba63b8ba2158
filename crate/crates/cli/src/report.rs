//! Report rendering: JSON with a stable field order and floats at 17
//! significant digits (exact round-trip), CSV for limit studies.

use hardy_core::{LimitRow, McEstimate, VerificationReport};

/// Floats render as `d.dddddddddddddddde[-]x`; non-finite values become the
/// strings `"inf"`, `"-inf"` and `"nan"` so the output stays strict JSON.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "\"nan\"".to_string()
    } else if x == f64::INFINITY {
        "\"inf\"".to_string()
    } else if x == f64::NEG_INFINITY {
        "\"-inf\"".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_f64(v),
        None => "null".to_string(),
    }
}

/// Monte Carlo cross-check block embedded in a report.
#[derive(Debug, Clone, Copy)]
pub struct McBlock {
    pub estimate: McEstimate,
    pub agrees: bool,
}

/// Renders the verification report with `schema_version` "1".
pub fn render_report(rep: &VerificationReport, mc: Option<&McBlock>) -> String {
    let mc_text = match mc {
        None => "null".to_string(),
        Some(block) => format!(
            "{{\"mean\": {}, \"std_error\": {}, \"n\": {}, \"seed\": {}, \"agrees\": {}}}",
            fmt_f64(block.estimate.mean),
            fmt_f64(block.estimate.std_error),
            block.estimate.n,
            block.estimate.seed,
            block.agrees
        ),
    };
    format!(
        "{{\n  \"schema_version\": \"1\",\n  \"theorem\": \"{}\",\n  \"p\": {},\n  \"lhs\": {},\n  \"rhs_sharpened\": {},\n  \"rhs_classic\": {},\n  \"alpha\": {},\n  \"satisfied\": {},\n  \"margin\": {},\n  \"quad_error\": {},\n  \"mc\": {}\n}}\n",
        rep.theorem,
        fmt_f64(rep.p),
        fmt_f64(rep.lhs),
        fmt_opt(rep.rhs_sharpened),
        fmt_f64(rep.rhs_classic),
        fmt_opt(rep.alpha),
        rep.satisfied,
        fmt_f64(rep.margin),
        fmt_f64(rep.quad_error),
        mc_text
    )
}

/// One CSV row per grid size; the alpha column is empty for `p < 1` rows.
pub fn render_limit_csv(rows: &[LimitRow]) -> String {
    let mut out = String::from("K,scaled_lhs,scaled_rhs,alpha_K,gap_to_classic\n");
    for row in rows {
        let alpha = row.alpha.map(|a| format!("{a:.16e}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{},{:.16e}\n",
            row.k, row.scaled_lhs, row.scaled_rhs, alpha, row.gap_to_classic
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_round_trips() {
        for x in [
            1.0,
            std::f64::consts::PI,
            0.1 + 0.2,
            1.2345678901234567e-300,
            -7.0 / 3.0,
        ] {
            let text = fmt_f64(x);
            let back: f64 = text.parse().unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{text}");
        }
        assert_eq!(fmt_f64(f64::INFINITY), "\"inf\"");
        assert_eq!(fmt_f64(f64::NEG_INFINITY), "\"-inf\"");
        assert_eq!(fmt_f64(f64::NAN), "\"nan\"");
    }
}
