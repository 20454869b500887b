//! Two-dimensional views of a training matrix.
//!
//! Rows are projected with a dense Gaussian matrix `P` of shape `dim x 2`
//! whose entries are N(0, 1/2) draws from the projection stream of the run
//! seed, filled row-major (`P[0][0], P[0][1], P[1][0], ...`). This is a
//! generic random projection, not a reconstruction of any particular plot.

use std::fmt::Write as _;

use spamsmote::rng::{SeededRng, PROJECTION_STREAM};
use spamsmote::{FeatureMatrix, Label};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterRow {
    pub x: f64,
    pub y: f64,
    pub class: Label,
    pub synthetic: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionScatter {
    pub seed: u64,
    pub input_dim: usize,
    pub rows: Vec<ScatterRow>,
}

pub fn projection_matrix(dim: usize, seed: u64) -> Vec<[f64; 2]> {
    let mut rng = SeededRng::stream(seed, PROJECTION_STREAM);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    (0..dim)
        .map(|_| {
            let a = rng.gaussian() * scale;
            let b = rng.gaussian() * scale;
            [a, b]
        })
        .collect()
}

/// Rows at index `original_rows` and beyond are flagged synthetic.
pub fn project(matrix: &FeatureMatrix, original_rows: usize, seed: u64) -> ProjectionScatter {
    let p = projection_matrix(matrix.dim(), seed);
    let rows = matrix
        .rows()
        .iter()
        .zip(matrix.labels())
        .enumerate()
        .map(|(i, (row, &class))| {
            let (mut x, mut y) = (0.0, 0.0);
            for (j, v) in row.iter() {
                x += v * p[j][0];
                y += v * p[j][1];
            }
            ScatterRow {
                x,
                y,
                class,
                synthetic: i >= original_rows,
            }
        })
        .collect();
    ProjectionScatter {
        seed,
        input_dim: matrix.dim(),
        rows,
    }
}

impl ProjectionScatter {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self) -> String {
        let mut out = format!(
            "# seeded Gaussian random projection to 2-D (seed={}, input_dim={}); not the original figure method\n",
            self.seed, self.input_dim
        );
        out.push_str("x,y,class,synthetic\n");
        for r in &self.rows {
            let _ = writeln!(out, "{:?},{:?},{},{}", r.x, r.y, r.class, r.synthetic);
        }
        out
    }

    /// Minimal standalone SVG. The larger original class is drawn as filled
    /// circles, the smaller as filled squares, synthetic rows as hollow
    /// squares.
    pub fn to_svg(&self) -> String {
        const W: f64 = 640.0;
        const H: f64 = 480.0;
        const PAD: f64 = 30.0;
        let originals = self.rows.iter().filter(|r| !r.synthetic);
        let spam = originals.clone().filter(|r| r.class == Label::Spam).count();
        let non_spam = originals.count() - spam;
        let majority = if spam > non_spam { Label::Spam } else { Label::NonSpam };

        let bound = |f: fn(&ScatterRow) -> f64| {
            self.rows.iter().map(f).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            })
        };
        let (x0, x1) = bound(|r| r.x);
        let (y0, y1) = bound(|r| r.y);
        let sx = |x: f64| if x1 > x0 { PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD) } else { W / 2.0 };
        let sy = |y: f64| if y1 > y0 { H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD) } else { H / 2.0 };

        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
        );
        let _ = writeln!(out, r##"<rect width="{W}" height="{H}" fill="#ffffff"/>"##);
        let _ = writeln!(
            out,
            r##"<text x="{PAD}" y="18" font-family="sans-serif" font-size="12">random projection, seed {}: circle = class {majority} (majority), square = class {} (minority), hollow = synthetic</text>"##,
            self.seed,
            majority.other()
        );
        for r in &self.rows {
            let (cx, cy) = (sx(r.x), sy(r.y));
            if r.class == majority {
                let _ = writeln!(out, r##"<circle cx="{cx:.2}" cy="{cy:.2}" r="3" fill="#1f77b4"/>"##);
            } else if r.synthetic {
                let _ = writeln!(
                    out,
                    r##"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="none" stroke="#d62728"/>"##,
                    cx - 3.0,
                    cy - 3.0
                );
            } else {
                let _ = writeln!(
                    out,
                    r##"<rect x="{:.2}" y="{:.2}" width="6" height="6" fill="#d62728"/>"##,
                    cx - 3.0,
                    cy - 3.0
                );
            }
        }
        out.push_str("</svg>\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use spamsmote::SparseVector;

    #[test]
    fn projection_is_linear_and_seeded() {
        let m = FeatureMatrix::new(
            3,
            vec![
                SparseVector::new(3, vec![(0, 1.0)]).unwrap(),
                SparseVector::new(3, vec![(0, 2.0), (2, 1.0)]).unwrap(),
            ],
            vec![Label::NonSpam, Label::Spam],
        )
        .unwrap();
        let p = projection_matrix(3, 9);
        let s = project(&m, 1, 9);
        assert_eq!(s.rows[0].x, p[0][0]);
        assert_eq!(s.rows[1].y, 2.0 * p[0][1] + p[2][1]);
        assert!(!s.rows[0].synthetic && s.rows[1].synthetic);
        assert_eq!(s, project(&m, 1, 9));
        assert_ne!(s.rows[0].x, project(&m, 1, 10).rows[0].x);
    }

    #[test]
    fn csv_has_header_and_one_line_per_row() {
        let m = FeatureMatrix::new(1, vec![SparseVector::zeros(1)], vec![Label::Spam]).unwrap();
        let csv = project(&m, 1, 0).to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# seeded Gaussian random projection"));
        assert_eq!(lines[1], "x,y,class,synthetic");
        assert_eq!(lines[2], "0.0,0.0,1,false");
        assert_eq!(lines.len(), 3);
        assert!(project(&m, 1, 0).to_svg().contains("<circle"));
    }
}
