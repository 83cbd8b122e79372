use crate::error::{config, Result};

/// `t_n = T (n / N)^gamma`, `n = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TimePartition {
    final_time: f64,
    steps: usize,
    grading: f64,
}

impl TimePartition {
    pub fn new(final_time: f64, steps: usize, grading: f64) -> Result<Self> {
        if !(final_time > 0.0) || !final_time.is_finite() {
            return config(format!("final time must be positive, got {final_time}"));
        }
        if steps == 0 {
            return config("a time partition needs at least one step");
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return config(format!("grading exponent must be >= 1, got {grading}"));
        }
        Ok(TimePartition { final_time, steps, grading })
    }

    pub fn uniform(final_time: f64, steps: usize) -> Result<Self> {
        TimePartition::new(final_time, steps, 1.0)
    }

    /// Grading `min(2 / alpha, 4)`.
    pub fn default_grading(alpha: f64) -> f64 {
        (2.0 / alpha).min(4.0)
    }

    pub fn final_time(&self) -> f64 {
        self.final_time
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn grading(&self) -> f64 {
        self.grading
    }

    pub fn with_steps(&self, steps: usize) -> Result<Self> {
        TimePartition::new(self.final_time, steps, self.grading)
    }

    pub fn points(&self) -> Vec<f64> {
        let n = self.steps as f64;
        let mut t: Vec<f64> = (0..=self.steps)
            .map(|i| {
                let s = i as f64 / n;
                self.final_time * if self.grading == 1.0 { s } else { s.powf(self.grading) }
            })
            .collect();
        t[self.steps] = self.final_time;
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_and_graded_points() {
        let u = TimePartition::uniform(2.0, 4).unwrap().points();
        assert_eq!(u, vec![0.0, 0.5, 1.0, 1.5, 2.0]);
        let g = TimePartition::new(1.0, 4, 2.0).unwrap().points();
        assert_eq!(g, vec![0.0, 0.0625, 0.25, 0.5625, 1.0]);
        assert!(TimePartition::new(1.0, 0, 1.0).is_err());
        assert!(TimePartition::new(1.0, 3, 0.5).is_err());
        assert!(TimePartition::new(0.0, 3, 1.0).is_err());
        assert_eq!(TimePartition::default_grading(0.25), 4.0);
        assert_eq!(TimePartition::default_grading(1.0), 2.0);
    }
}
