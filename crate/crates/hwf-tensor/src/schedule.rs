//! Training hyperparameters and the warmup + cosine learning-rate schedule.

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub lr_max: f64,
    pub lr_min: f64,
    /// Warmup epochs (the schedule ramps linearly from 0 to `lr_max` here).
    pub warmup_epochs: u32,
    pub total_epochs: u32,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            lr_max: 1e-4,
            lr_min: 1e-6,
            warmup_epochs: 10,
            total_epochs: 100,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            batch_size: 1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.lr_min > 0.0 && self.lr_min <= self.lr_max) {
            return Err("need 0 < lr_min <= lr_max".into());
        }
        if !(self.warmup_epochs > 0 && self.warmup_epochs < self.total_epochs) {
            return Err("need 0 < warmup_epochs < total_epochs".into());
        }
        if self.batch_size == 0 {
            return Err("batch_size must be positive".into());
        }
        Ok(())
    }
}

/// Learning rate at epoch `t` (1-based during training): linear ramp from 0
/// to `lr_max` over the warmup, then cosine decay
/// `lr_max * 0.5 * (1 + cos((t - t0) / (T - t0) * pi))` floored at `lr_min`.
pub fn lr_at(t: u32, cfg: &TrainConfig) -> f64 {
    let t0 = cfg.warmup_epochs;
    if t <= t0 {
        return cfg.lr_max * t as f64 / t0 as f64;
    }
    let span = (cfg.total_epochs - t0) as f64;
    let decayed = cfg.lr_max * 0.5 * (1.0 + ((t - t0) as f64 / span * std::f64::consts::PI).cos());
    decayed.max(cfg.lr_min)
}
