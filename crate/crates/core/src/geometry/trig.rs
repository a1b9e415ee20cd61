use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{arg_err, Result};

/// Real trigonometric polynomial on `Y = [-1/2, 1/2]`:
/// `b(y) = Σ_k a_k cos(2πky) + s_k sin(2πky)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TrigPolynomial {
    /// Entries `(k, cos coefficient, sin coefficient)`, `k >= 0`, sorted and merged.
    terms: Vec<(u32, f64, f64)>,
}

impl TrigPolynomial {
    pub fn new(terms: Vec<(u32, f64, f64)>) -> Self {
        let mut terms = terms;
        terms.sort_by_key(|t| t.0);
        let mut merged: Vec<(u32, f64, f64)> = Vec::new();
        for (k, c, s) in terms {
            let s = if k == 0 { 0.0 } else { s };
            match merged.last_mut() {
                Some(last) if last.0 == k => {
                    last.1 += c;
                    last.2 += s;
                }
                _ => merged.push((k, c, s)),
            }
        }
        merged.retain(|t| t.1 != 0.0 || t.2 != 0.0);
        TrigPolynomial { terms: merged }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![(0, c, 0.0)])
    }

    pub fn zero() -> Self {
        TrigPolynomial { terms: Vec::new() }
    }

    /// The default profile `2 + cos(2πy)`.
    pub fn two_plus_cos() -> Self {
        Self::new(vec![(0, 2.0, 0.0), (1, 1.0, 0.0)])
    }

    /// Parses sums like `2+cos`, `2 + 0.5*cos3 - sin2` or `1.5`; `cosK`
    /// stands for `cos(2πKy)`.
    pub fn parse(text: &str) -> Result<Self> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(arg_err!("empty profile expression"));
        }
        let chars: Vec<char> = cleaned.chars().collect();
        let mut tokens: Vec<(f64, String)> = Vec::new();
        let mut sign = 1.0;
        let mut cur = String::new();
        for (i, &c) in chars.iter().enumerate() {
            // a sign after a mantissa's `e` belongs to the exponent
            let exponent_sign = i >= 2
                && matches!(chars[i - 1], 'e' | 'E')
                && chars[i - 2].is_ascii_digit();
            if (c == '+' || c == '-') && !exponent_sign {
                if !cur.is_empty() {
                    tokens.push((sign, std::mem::take(&mut cur)));
                } else if !tokens.is_empty() || i > 0 {
                    return Err(arg_err!("dangling sign in `{text}`"));
                }
                sign = if c == '-' { -1.0 } else { 1.0 };
            } else {
                cur.push(c);
            }
        }
        if cur.is_empty() {
            return Err(arg_err!("dangling sign in `{text}`"));
        }
        tokens.push((sign, cur));
        let terms = tokens
            .iter()
            .map(|(sg, tok)| parse_term(tok, *sg))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(terms))
    }

    pub fn terms(&self) -> &[(u32, f64, f64)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when some mode with `k >= 1` is present.
    pub fn is_nonconstant(&self) -> bool {
        self.terms.iter().any(|t| t.0 > 0)
    }

    pub fn mean(&self) -> f64 {
        self.terms.iter().find(|t| t.0 == 0).map(|t| t.1).unwrap_or(0.0)
    }

    pub fn max_mode(&self) -> u32 {
        self.terms.iter().map(|t| t.0).max().unwrap_or(0)
    }

    /// `b^{(n)}(y)`.
    pub fn derivative(&self, y: f64, n: usize) -> f64 {
        let mut s = 0.0;
        for &(k, a, b) in &self.terms {
            if k == 0 {
                if n == 0 {
                    s += a;
                }
                continue;
            }
            let w = 2.0 * PI * k as f64;
            let phase = w * y + n as f64 * PI / 2.0;
            s += w.powi(n as i32) * (a * phase.cos() + b * phase.sin());
        }
        s
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.derivative(y, 0)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::new(self.terms.iter().map(|&(k, a, b)| (k, c * a, c * b)).collect())
    }

    /// `sup_y |b^{(n)}(y)|` over one period.
    pub fn sup_abs_derivative(&self, n: usize) -> f64 {
        let samples = 64 * self.max_mode().max(1) as usize;
        sup_abs_periodic(|y| self.derivative(y, n), -0.5, 0.5, samples)
    }

    pub fn min_value(&self) -> f64 {
        let samples = 64 * self.max_mode().max(1) as usize;
        -sup_periodic(|y| -self.eval(y), -0.5, 0.5, samples)
    }
}

fn parse_term(token: &str, sign: f64) -> Result<(u32, f64, f64)> {
    let bad = || arg_err!("cannot parse profile term `{token}`");
    let (coef, func) = match token.find(|c: char| c.is_ascii_alphabetic() && c != 'e' && c != 'E') {
        Some(pos) => {
            let c = token[..pos].trim_end_matches('*');
            let coef = if c.is_empty() { 1.0 } else { c.parse::<f64>().map_err(|_| bad())? };
            (coef, &token[pos..])
        }
        None => return Ok((0, sign * token.parse::<f64>().map_err(|_| bad())?, 0.0)),
    };
    let (is_cos, k) = if let Some(k) = func.strip_prefix("cos") {
        (true, k)
    } else if let Some(k) = func.strip_prefix("sin") {
        (false, k)
    } else {
        return Err(bad());
    };
    let k = k.trim_start_matches('(').trim_end_matches(')');
    let k: u32 = if k.is_empty() { 1 } else { k.parse().map_err(|_| bad())? };
    if k == 0 {
        return Err(bad());
    }
    Ok(if is_cos { (k, sign * coef, 0.0) } else { (k, 0.0, sign * coef) })
}

/// `sup f` over `[a, b]` from `samples` equispaced points plus golden-section
/// refinement around the best few samples.
pub fn sup_periodic(f: impl Fn(f64) -> f64, a: f64, b: f64, samples: usize) -> f64 {
    let samples = samples.max(8);
    let h = (b - a) / samples as f64;
    let vals: Vec<(f64, f64)> = (0..=samples).map(|i| {
        let x = a + i as f64 * h;
        (x, f(x))
    }).collect();
    let mut best = vals.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
    for i in 1..samples {
        if vals[i].1 >= vals[i - 1].1 && vals[i].1 >= vals[i + 1].1 {
            best = best.max(golden_max(&f, vals[i - 1].0, vals[i + 1].0));
        }
    }
    best
}

pub fn sup_abs_periodic(f: impl Fn(f64) -> f64, a: f64, b: f64, samples: usize) -> f64 {
    sup_periodic(|x| f(x).abs(), a, b, samples)
}

fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
        if hi - lo < 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    f1.max(f2)
}
