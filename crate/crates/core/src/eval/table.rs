//! Plain-text table formatting.

/// `x` with 10 significant digits, plain decimal where that stays readable.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i32;
    if !(-5..10).contains(&magnitude) {
        return format!("{x:.9e}");
    }
    let decimals = (9 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Joins cells with tabs.
pub fn row(cells: &[String]) -> String {
    cells.join("\t")
}
