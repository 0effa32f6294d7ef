/// Truncated Taylor series `sum_k c_k e^k`, used to get exact higher
/// derivatives of closed-form profiles.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet(pub Vec<f64>);

impl Jet {
    pub fn constant(c: f64, order: usize) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = c;
        Jet(v)
    }

    /// The jet of the identity at `x`.
    pub fn variable(x: f64, order: usize) -> Self {
        let mut v = vec![0.0; order + 1];
        v[0] = x;
        if order > 0 {
            v[1] = 1.0;
        }
        Jet(v)
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let n = self.0.len();
        let mut out = vec![0.0; n];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().take(n - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet(out)
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet(self.0.iter().map(|c| c * s).collect())
    }

    pub fn add(&self, o: &Jet) -> Jet {
        Jet(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn recip(&self) -> Jet {
        let n = self.0.len();
        let u0 = self.0[0];
        let mut r = vec![0.0; n];
        r[0] = 1.0 / u0;
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| self.0[j] * r[k - j]).sum();
            r[k] = -s / u0;
        }
        Jet(r)
    }

    pub fn exp(&self) -> Jet {
        let n = self.0.len();
        let mut g = vec![0.0; n];
        g[0] = self.0[0].exp();
        for k in 1..n {
            let s: f64 = (1..=k).map(|j| j as f64 * self.0[j] * g[k - j]).sum();
            g[k] = s / k as f64;
        }
        Jet(g)
    }

    pub fn powi(&self, p: u32) -> Jet {
        let mut out = Jet::constant(1.0, self.order());
        for _ in 0..p {
            out = out.mul(self);
        }
        out
    }

    /// `k`-th derivative, `k! c_k`.
    pub fn derivative(&self, k: usize) -> f64 {
        let f: f64 = (1..=k).map(|i| i as f64).product();
        self.0[k] * f
    }
}
