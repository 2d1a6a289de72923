//! Plain-text and LaTeX rendering of correlators, volumes and intersection tables.
//!
//! Terms are listed by descending total degree, one orbit of the symmetric
//! group per term; an orbit with several monomials is printed as a
//! parenthesized sum.

use crate::poly::{CorrelatorPoly, ExponentKey, ShapedPoly, SymPoly, VolumePoly};
use crate::scalar::PiScalar;
use crate::transforms::IntersectionTable;

fn ordered_terms(p: &SymPoly) -> Vec<(&ExponentKey, &PiScalar)> {
    let mut terms: Vec<_> = p.iter().collect();
    terms.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then(b.0.cmp(a.0)));
    terms
}

fn coeff_text(c: &PiScalar) -> String {
    if c.len() > 1 {
        format!("({c})")
    } else {
        c.to_string()
    }
}

fn render_text(p: &SymPoly, monomial: impl Fn(&[u32]) -> Option<String>) -> String {
    let terms = ordered_terms(p);
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .into_iter()
        .map(|(key, c)| {
            let monos: Vec<String> = key
                .permutations()
                .iter()
                .filter_map(|perm| monomial(perm))
                .collect();
            match monos.len() {
                0 => c.to_string(),
                1 => format!("{} * {}", coeff_text(c), monos[0]),
                _ => format!("{} * ({})", coeff_text(c), monos.join("+")),
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

/// `1/8 * z1^-4 + 1/12*pi^2 * z1^-2`
pub fn correlator_text(w: &CorrelatorPoly) -> String {
    render_text(w.sym(), |d| {
        Some(
            d.iter()
                .enumerate()
                .map(|(i, &e)| format!("z{}^-{}", i + 1, 2 * e + 2))
                .collect::<Vec<_>>()
                .join("*"),
        )
    })
}

/// `1/48 * L1^2 + 1/12*pi^2`
pub fn volume_text(v: &VolumePoly) -> String {
    render_text(v.sym(), |d| {
        let parts: Vec<String> = d
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| format!("L{}^{}", i + 1, 2 * e))
            .collect();
        (!parts.is_empty()).then(|| parts.join("*"))
    })
}

fn render_latex(p: &SymPoly, monomial: impl Fn(&[u32]) -> Option<String>) -> String {
    let terms = ordered_terms(p);
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .into_iter()
        .map(|(key, c)| {
            let coeff = if c.len() > 1 {
                format!("\\left({}\\right)", c.to_latex())
            } else {
                c.to_latex()
            };
            let monos: Vec<String> = key
                .permutations()
                .iter()
                .filter_map(|perm| monomial(perm))
                .collect();
            match monos.len() {
                0 => coeff,
                1 => format!("{coeff} {}", monos[0]),
                _ => format!("{coeff} \\left({}\\right)", monos.join(" + ")),
            }
        })
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn correlator_latex(w: &CorrelatorPoly) -> String {
    render_latex(w.sym(), |d| {
        let den: Vec<String> = d
            .iter()
            .enumerate()
            .map(|(i, &e)| format!("z_{}^{{{}}}", i + 1, 2 * e + 2))
            .collect();
        Some(format!("\\frac{{1}}{{{}}}", den.join(" ")))
    })
}

pub fn volume_latex(v: &VolumePoly) -> String {
    render_latex(v.sym(), |d| {
        let parts: Vec<String> = d
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| format!("L_{}^{{{}}}", i + 1, 2 * e))
            .collect();
        (!parts.is_empty()).then(|| parts.join(" "))
    })
}

/// One line per entry: `<kappa1^d0 tau_d1 ... tau_dn>_g = value`.
pub fn intersections_text(t: &IntersectionTable) -> String {
    let mut lines = Vec::new();
    for (key, e) in t.entries.iter().rev() {
        let taus: Vec<String> = key.as_slice().iter().map(|d| format!("tau_{d}")).collect();
        let kappa = match e.d0 {
            0 => String::new(),
            1 => "kappa1 ".into(),
            d => format!("kappa1^{d} "),
        };
        lines.push(format!("<{kappa}{}>_{} = {}", taus.join(" "), t.g, e.value));
    }
    lines.join("\n")
}

pub fn intersections_latex(t: &IntersectionTable) -> String {
    let mut lines = Vec::new();
    for (key, e) in t.entries.iter().rev() {
        let taus: Vec<String> = key
            .as_slice()
            .iter()
            .map(|d| format!("\\tau_{{{d}}}"))
            .collect();
        let kappa = match e.d0 {
            0 => String::new(),
            1 => "\\kappa_1 ".into(),
            d => format!("\\kappa_1^{{{d}}} "),
        };
        lines.push(format!(
            "\\left<{kappa}{}\\right>_{{{}}} = {}",
            taus.join(" "),
            t.g,
            e.value.to_latex()
        ));
    }
    lines.join("\n")
}
