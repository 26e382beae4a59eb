//! Ball/cell predicates and overlap areas used by covers and packing weights.

/// Squared distance from `p` to the farthest point of the cell with low corner
/// `lo` and width `h` (first `n` axes).
pub fn far_dist2(p: [f64; 3], lo: [f64; 3], h: f64, n: usize) -> f64 {
    let mut sq = 0.0;
    for k in 0..n {
        let d = (p[k] - lo[k]).abs().max((p[k] - (lo[k] + h)).abs());
        sq += d * d;
    }
    sq
}

/// Squared distance from `p` to the nearest point of the cell (0 if inside).
pub fn near_dist2(p: [f64; 3], lo: [f64; 3], h: f64, n: usize) -> f64 {
    let mut sq = 0.0;
    for k in 0..n {
        let d = (lo[k] - p[k]).max(p[k] - (lo[k] + h)).max(0.0);
        sq += d * d;
    }
    sq
}

pub fn ball_contains_cell(center: [f64; 3], radius: f64, lo: [f64; 3], h: f64, n: usize) -> bool {
    far_dist2(center, lo, h, n) <= radius * radius
}

pub fn ball_intersects_cell(center: [f64; 3], radius: f64, lo: [f64; 3], h: f64, n: usize) -> bool {
    near_dist2(center, lo, h, n) <= radius * radius
}

/// Upper bound on `vol(cell ∩ B(center, radius)) / h^n`, in `[0, 1]`.
/// Exact in dimensions 1 and 2; in dimension 3 it falls back to the
/// (conservative) indicator of intersection.
pub fn overlap_fraction(center: [f64; 3], radius: f64, lo: [f64; 3], h: f64, n: usize) -> f64 {
    match n {
        1 => {
            let a = (center[0] - radius).max(lo[0]);
            let b = (center[0] + radius).min(lo[0] + h);
            ((b - a) / h).clamp(0.0, 1.0)
        }
        2 => {
            let area = circle_rect_area(
                center[0],
                center[1],
                radius,
                lo[0],
                lo[0] + h,
                lo[1],
                lo[1] + h,
            );
            ((area / (h * h)) * (1.0 + 1e-12)).clamp(0.0, 1.0)
        }
        _ => {
            if ball_intersects_cell(center, radius, lo, h, n) {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Exact area of `disk((cx,cy), r) ∩ [x0,x1]×[y0,y1]` by inclusion–exclusion
/// of the corner primitive `corner_area`.
pub fn circle_rect_area(cx: f64, cy: f64, r: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let a = corner_area(x1 - cx, y1 - cy, r) - corner_area(x0 - cx, y1 - cy, r)
        - corner_area(x1 - cx, y0 - cy, r)
        + corner_area(x0 - cx, y0 - cy, r);
    a.max(0.0)
}

/// Area of `{(u,v) : u² + v² ≤ r², u ≤ x, v ≤ y}` for a disk centred at the
/// origin.
fn corner_area(x: f64, y: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let x = x.clamp(-r, r);
    if y <= -r {
        return 0.0;
    }
    if y >= r {
        return left_area(x, r);
    }
    // ±u* are the abscissas where the circle crosses the line v = y.
    let ustar = (r * r - y * y).max(0.0).sqrt();
    if y >= 0.0 {
        // len(u) = y + s(u) for |u| ≤ u*, otherwise 2 s(u)
        let a = (-ustar).min(x);
        let mut area = left_area(a, r); // region u ≤ min(x, -u*) is a full slice
        if x > -ustar {
            let b = x.min(ustar);
            area += y * (b - a) + half_slice(a, b, r);
            if x > ustar {
                area += left_area(x, r) - left_area(ustar, r);
            }
        }
        area
    } else {
        // only |u| ≤ u* contributes, len(u) = y + s(u)
        let a = -ustar;
        let b = x.min(ustar);
        if b <= a {
            return 0.0;
        }
        y * (b - a) + half_slice(a, b, r)
    }
}

/// `∫_a^b sqrt(r² - u²) du`.
fn half_slice(a: f64, b: f64, r: f64) -> f64 {
    antider(b, r) - antider(a, r)
}

fn antider(u: f64, r: f64) -> f64 {
    let u = u.clamp(-r, r);
    0.5 * (u * (r * r - u * u).max(0.0).sqrt() + r * r * (u / r).clamp(-1.0, 1.0).asin())
}

/// Area of the disk left of the vertical line `u = x`.
fn left_area(x: f64, r: f64) -> f64 {
    let x = x.clamp(-r, r);
    x * (r * r - x * x).max(0.0).sqrt() + r * r * ((x / r).asin() + std::f64::consts::FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn left_area_spans_zero_to_full_disk() {
        let r = 1.3;
        assert!((left_area(-r, r)).abs() < 1e-12);
        assert!((left_area(0.0, r) - PI * r * r / 2.0).abs() < 1e-12);
        assert!((left_area(r, r) - PI * r * r).abs() < 1e-12);
    }

    #[test]
    fn rect_containing_circle_gives_full_area() {
        let r = 0.8;
        let a = circle_rect_area(0.1, -0.2, r, -2.0, 2.0, -2.0, 2.0);
        assert!((a - PI * r * r).abs() < 1e-10);
    }

    #[test]
    fn quadrant_of_centred_circle() {
        let r = 1.0;
        let a = circle_rect_area(0.0, 0.0, r, 0.0, 2.0, 0.0, 2.0);
        assert!((a - PI / 4.0).abs() < 1e-10);
    }

    #[test]
    fn circle_rect_area_matches_subsampling() {
        // deterministic midpoint subsampling as an independent check
        let cases = [
            (0.3, -0.1, 0.7, -0.5, 0.5, -0.5, 0.5),
            (0.0, 0.0, 0.25, 0.1, 0.6, -0.3, 0.2),
            (-1.0, 0.5, 1.1, -0.5, 0.5, 0.0, 1.0),
            (0.0, 0.0, 2.0, -0.5, 0.5, -0.5, 0.5),
            (0.9, 0.9, 1.0, -0.5, 0.5, -0.5, 0.5),
        ];
        for &(cx, cy, r, x0, x1, y0, y1) in &cases {
            let m = 400usize;
            let (dx, dy) = ((x1 - x0) / m as f64, (y1 - y0) / m as f64);
            let mut hits = 0usize;
            for i in 0..m {
                for j in 0..m {
                    let (u, v) = (x0 + (i as f64 + 0.5) * dx, y0 + (j as f64 + 0.5) * dy);
                    if (u - cx).powi(2) + (v - cy).powi(2) <= r * r {
                        hits += 1;
                    }
                }
            }
            let approx = hits as f64 * dx * dy;
            let exact = circle_rect_area(cx, cy, r, x0, x1, y0, y1);
            let tol = 6.0 * (x1 - x0).max(y1 - y0) / m as f64 * r.max(0.3);
            assert!(
                (approx - exact).abs() < tol,
                "case {:?}: exact {} vs sampled {}",
                (cx, cy, r),
                exact,
                approx
            );
        }
    }

    #[test]
    fn containment_and_intersection_agree_with_geometry() {
        let lo = [0.0, 0.0, 0.0];
        let h = 1.0;
        // ball around the cell centre: needs radius ≥ h·√2/2 to contain in 2d
        assert!(!ball_contains_cell([0.5, 0.5, 0.0], 0.70, lo, h, 2));
        assert!(ball_contains_cell([0.5, 0.5, 0.0], 0.71, lo, h, 2));
        assert!(ball_intersects_cell([1.4, 0.5, 0.0], 0.5, lo, h, 2));
        assert!(!ball_intersects_cell([1.6, 0.5, 0.0], 0.5, lo, h, 2));
    }

    #[test]
    fn overlap_fraction_is_exact_in_1d() {
        let lo = [0.0, 0.0, 0.0];
        assert_eq!(overlap_fraction([0.0, 0.0, 0.0], 0.5, lo, 1.0, 1), 0.5);
        assert_eq!(overlap_fraction([2.0, 0.0, 0.0], 0.5, lo, 1.0, 1), 0.0);
        assert_eq!(overlap_fraction([0.5, 0.0, 0.0], 2.0, lo, 1.0, 1), 1.0);
    }
}
