use num_traits::{One, Zero};

use crate::exactnum::poly::{eval_ball, eval_rational, trim};
use crate::exactnum::rational::{int, mul_pow2, Rational};
use crate::exactnum::RealBall;

/// Continuous function on `[breaks[0], breaks[last]]` given by one rational
/// polynomial per interval `[breaks[i], breaks[i+1]]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly {
    breaks: Vec<Rational>,
    pieces: Vec<Vec<Rational>>,
}

/// p(t + c).
pub fn shift(p: &[Rational], c: &Rational) -> Vec<Rational> {
    // Horner with the linear polynomial (t + c)
    let mut out: Vec<Rational> = Vec::new();
    for a in p.iter().rev() {
        let mut next = vec![Rational::zero(); out.len() + 1];
        for (i, x) in out.iter().enumerate() {
            next[i + 1] += x;
            next[i] += x * c;
        }
        next[0] += a;
        out = next;
    }
    trim(out)
}

/// Antiderivative vanishing at 0.
pub fn antiderivative(p: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero()];
    out.extend(p.iter().enumerate().map(|(i, c)| c / int(i as i64 + 1)));
    trim(out)
}

impl PiecewisePoly {
    pub fn new(breaks: Vec<Rational>, pieces: Vec<Vec<Rational>>) -> PiecewisePoly {
        assert_eq!(breaks.len(), pieces.len() + 1);
        assert!(breaks.windows(2).all(|w| w[0] < w[1]), "breakpoints must increase");
        PiecewisePoly { breaks, pieces: pieces.into_iter().map(trim).collect() }
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<Rational>] {
        &self.pieces
    }

    pub fn domain(&self) -> (&Rational, &Rational) {
        (&self.breaks[0], self.breaks.last().unwrap())
    }

    /// Index of the piece containing t (the left one at interior breakpoints).
    fn piece_of(&self, t: &Rational) -> usize {
        let k = self.breaks[1..].iter().position(|b| t <= b).unwrap_or(self.pieces.len() - 1);
        k.min(self.pieces.len() - 1)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        eval_rational(&self.pieces[self.piece_of(t)], t)
    }

    /// Ball enclosure: each piece meeting the ball is evaluated on the part of
    /// the ball inside its interval.
    pub fn eval_ball(&self, t: &RealBall) -> RealBall {
        if let Some(q) = t.exact_value() {
            return RealBall::exact(self.eval(q), t.prec());
        }
        let (lo, hi) = (t.lo(), t.hi());
        let mut out: Option<RealBall> = None;
        for (i, p) in self.pieces.iter().enumerate() {
            let (a, b) = (&self.breaks[i], &self.breaks[i + 1]);
            if hi < *a || lo > *b {
                continue;
            }
            let l = if lo > *a { lo.clone() } else { a.clone() };
            let h = if hi < *b { hi.clone() } else { b.clone() };
            let v = if l == lo && h == hi { eval_ball(p, t) } else { eval_ball(p, &RealBall::from_interval(l, h, t.prec())) };
            out = Some(match out {
                None => v,
                Some(o) => o.hull(&v),
            });
        }
        out.expect("ball meets the domain")
    }

    /// Exact continuity at every interior breakpoint.
    pub fn is_continuous(&self) -> bool {
        (1..self.pieces.len()).all(|i| {
            eval_rational(&self.pieces[i - 1], &self.breaks[i]) == eval_rational(&self.pieces[i], &self.breaks[i])
        })
    }

    pub fn derivative(&self) -> PiecewisePoly {
        let pieces = self.pieces.iter().map(|p| crate::exactnum::poly::derivative(p)).collect();
        PiecewisePoly { breaks: self.breaks.clone(), pieces }
    }

    /// g(t) = ∫_{t−1}^{t} f(s) ds, where f is extended by `below` left of its
    /// domain and by `above` right of it. Requires integer breakpoints
    /// 0, 1, …, m; the result lives on 0, …, m + 1.
    pub fn unit_window_integral(&self, below: &Rational, above: &Rational) -> PiecewisePoly {
        let m = self.pieces.len();
        let piece = |j: i64| -> Vec<Rational> {
            if j < 0 {
                vec![below.clone()]
            } else if j as usize >= m {
                vec![above.clone()]
            } else {
                self.pieces[j as usize].clone()
            }
        };
        let mut pieces = Vec::with_capacity(m + 1);
        for k in 0..=m as i64 {
            let kq = int(k);
            let (gl, gr) = (antiderivative(&piece(k - 1)), antiderivative(&piece(k)));
            // G_{k−1}(k) − G_{k−1}(t − 1) + G_k(t) − G_k(k)
            let mut p = gr.clone();
            let shifted = shift(&gl, &int(-1));
            let n = p.len().max(shifted.len());
            p.resize(n, Rational::zero());
            for (i, c) in shifted.iter().enumerate() {
                p[i] -= c;
            }
            p[0] += eval_rational(&gl, &kq) - eval_rational(&gr, &kq);
            pieces.push(trim(p));
        }
        PiecewisePoly::new((0..=m as i64 + 1).map(int).collect(), pieces)
    }

    /// Solves f(t) = target on `[lo, hi]` where f is monotone there. Exact
    /// when the root is rational, a ball from the quadratic formula on
    /// quadratic pieces, bisection to 2^-prec otherwise.
    pub fn solve_monotone(&self, target: &Rational, lo: &Rational, hi: &Rational, prec: u32) -> RealBall {
        let (flo, fhi) = (self.eval(lo), self.eval(hi));
        let increasing = flo <= fhi;
        let sign = |v: &Rational| if increasing { v.clone() } else { -v };
        if &flo == target {
            return RealBall::exact(lo.clone(), prec);
        }
        if &fhi == target {
            return RealBall::exact(hi.clone(), prec);
        }
        assert!(sign(&(&flo - target)) < Rational::zero() && sign(&(&fhi - target)) > Rational::zero(), "target outside the range");
        // locate the piece containing the crossing
        let mut a = lo.clone();
        for (i, p) in self.pieces.iter().enumerate() {
            let b = if self.breaks[i + 1] < *hi { self.breaks[i + 1].clone() } else { hi.clone() };
            if b <= a {
                continue;
            }
            let fb = eval_rational(p, &b);
            if &fb == target {
                return RealBall::exact(b, prec);
            }
            if sign(&(&fb - target)) > Rational::zero() {
                return solve_on_piece(p, target, &a, &b, increasing, prec);
            }
            a = b;
        }
        unreachable!("monotone crossing not found")
    }
}

fn solve_on_piece(p: &[Rational], target: &Rational, a: &Rational, b: &Rational, increasing: bool, prec: u32) -> RealBall {
    let mut g = p.to_vec();
    if g.is_empty() {
        g.push(Rational::zero());
    }
    g[0] -= target;
    let g = trim(g);
    match g.len() {
        2 => return RealBall::exact(-&g[0] / &g[1], prec),
        3 => {
            let (c0, c1, c2) = (&g[0], &g[1], &g[2]);
            let disc = c1 * c1 - int(4) * c2 * c0;
            let sq = RealBall::exact(disc, prec + 8).sqrt().expect("real crossing has a real root");
            for s in [1i64, -1] {
                let r = sq.mul_q(&int(s)).add_q(&-c1).mul_q(&(Rational::one() / (int(2) * c2)));
                if r.hi() >= *a && r.lo() <= *b {
                    return r.with_prec(prec);
                }
            }
        }
        _ => {}
    }
    // bisection keeps g(lo) and g(hi) of opposite signs
    let (mut lo, mut hi) = (a.clone(), b.clone());
    let width = mul_pow2(&Rational::one(), -(prec as i64));
    while &hi - &lo > width {
        let mid = mul_pow2(&(&lo + &hi), -1);
        let v = eval_rational(&g, &mid);
        if v.is_zero() {
            return RealBall::exact(mid, prec);
        }
        if (v > Rational::zero()) == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RealBall::from_interval(lo, hi, prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    #[test]
    fn shifting_and_integrating() {
        let p = vec![int(1), int(2), int(3)];
        assert_eq!(shift(&p, &int(1)), vec![int(6), int(8), int(3)]);
        assert_eq!(antiderivative(&p), vec![int(0), int(1), int(1), int(1)]);
    }

    #[test]
    fn window_integral_of_indicator() {
        // f = 1 on [0, 1], 0 below, 1 above: g(t) = min(max(t, 0), 1) on [0, 2]
        let f = PiecewisePoly::new(vec![int(0), int(1)], vec![vec![int(1)]]);
        let g = f.unit_window_integral(&int(0), &int(1));
        assert_eq!(g.eval(&rat(1, 2)), rat(1, 2));
        assert_eq!(g.eval(&rat(3, 2)), int(1));
        assert!(g.is_continuous());
    }

    #[test]
    fn monotone_solving() {
        let f = PiecewisePoly::new(vec![int(0), int(1), int(2)], vec![vec![int(0), int(0), rat(1, 2)], vec![int(-1), int(2), rat(-1, 2)]]);
        assert_eq!(f.solve_monotone(&rat(1, 2), &int(0), &int(2), 64).exact_value(), Some(&int(1)));
        let r = f.solve_monotone(&rat(2, 5), &int(0), &int(2), 64);
        assert!(r.sqr().contains(&rat(4, 5)));
    }
}
