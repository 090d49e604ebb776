//! Three-way rate comparison (no re-sorting, OPT, LC) and per-band
//! decision listings.

use std::fmt::Write;

use crate::container::{encode_with_stats, temporal_decomposition, DecisionMode, EncodeStats, EncoderConfig};
use crate::dwt::{effective_levels, forward_2d, Orientation, SubbandPyramid};
use crate::error::{Error, Result};
use crate::resort::{boundary_sets_for, lc_statistic, resort, Quotient, ResortPlan};
use crate::tier1::subband_rate;
use crate::volume::Volume;

/// Outcome of encoding under one decision mode.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeRun {
    pub mode: DecisionMode,
    pub stats: EncodeStats,
}

impl ModeRun {
    /// HP payload plus signaling.
    pub fn hp_bytes(&self) -> u64 {
        self.stats.hp_payload_bytes + self.stats.signaling_bytes
    }

    pub fn frame_bytes(&self) -> Vec<u64> {
        self.stats
            .hp_frames
            .iter()
            .map(|f| f.payload_bytes + f.signaling_bytes)
            .collect()
    }

    fn plans(&self) -> Vec<Option<&ResortPlan>> {
        self.stats.hp_frames.iter().map(|f| f.plan.as_ref()).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateReport {
    pub width: usize,
    pub height: usize,
    pub frames: usize,
    pub none: ModeRun,
    pub opt: ModeRun,
    pub lc: ModeRun,
}

impl RateReport {
    /// Encodes `v` under all three modes; everything but the mode comes
    /// from `config`.
    pub fn build(v: &Volume, config: &EncoderConfig) -> Result<Self> {
        let run = |mode| -> Result<ModeRun> {
            let (_, stats) = encode_with_stats(v, &config.with_mode(mode))?;
            Ok(ModeRun { mode, stats })
        };
        let (none, (opt, lc)) = rayon::join(
            || run(DecisionMode::None),
            || rayon::join(|| run(DecisionMode::Opt), || run(DecisionMode::Lc)),
        );
        Ok(RateReport {
            width: v.width(),
            height: v.height(),
            frames: v.frame_count(),
            none: none?,
            opt: opt?,
            lc: lc?,
        })
    }

    pub fn run(&self, mode: DecisionMode) -> &ModeRun {
        match mode {
            DecisionMode::None => &self.none,
            DecisionMode::Opt => &self.opt,
            DecisionMode::Lc => &self.lc,
        }
    }

    pub fn hp_frames(&self) -> usize {
        self.none.stats.hp_frames.len()
    }

    pub fn savings_abs(&self, mode: DecisionMode) -> i64 {
        self.none.hp_bytes() as i64 - self.run(mode).hp_bytes() as i64
    }

    /// Savings as a fraction of the no-re-sort HP size.
    pub fn savings_rel(&self, mode: DecisionMode) -> f64 {
        match self.none.hp_bytes() {
            0 => 0.0,
            n => self.savings_abs(mode) as f64 / n as f64,
        }
    }

    /// `(abs_LC - abs_OPT) / abs_OPT` in percent; 0 when OPT saves nothing.
    pub fn rel_lc_opt_percent(&self) -> f64 {
        match self.savings_abs(DecisionMode::Opt) {
            0 => 0.0,
            o => 100.0 * (self.savings_abs(DecisionMode::Lc) - o) as f64 / o as f64,
        }
    }

    /// Fraction of candidate bands where LC and OPT decide alike.
    pub fn agreement(&self) -> f64 {
        let (mut same, mut total) = (0usize, 0usize);
        for (o, l) in self.opt.plans().into_iter().zip(self.lc.plans()) {
            if let (Some(o), Some(l)) = (o, l) {
                for (a, b) in o.decisions.iter().zip(&l.decisions) {
                    total += 1;
                    same += (a.resort == b.resort) as usize;
                }
            }
        }
        if total == 0 {
            1.0
        } else {
            same as f64 / total as f64
        }
    }

    pub fn candidates_per_frame(&self) -> usize {
        self.opt
            .stats
            .hp_frames
            .first()
            .and_then(|f| f.plan.as_ref())
            .map_or(0, |p| p.decisions.len())
    }

    /// OPT payload never exceeds the LC or the no-re-sort payload.
    pub fn dominance_holds(&self) -> bool {
        let p = |r: &ModeRun| r.stats.hp_payload_bytes;
        p(&self.opt) <= p(&self.lc) && p(&self.opt) <= p(&self.none)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "volume {}x{}x{}, {} HP frames, {} candidate bands per frame",
            self.width,
            self.height,
            self.frames,
            self.hp_frames(),
            self.candidates_per_frame()
        );
        let _ = writeln!(s, "{:>8} {:>12} {:>12} {:>12}", "frame", "none", "opt", "lc");
        let (n, o, l) = (self.none.frame_bytes(), self.opt.frame_bytes(), self.lc.frame_bytes());
        for i in 0..n.len() {
            let _ = writeln!(s, "{:>8} {:>12} {:>12} {:>12}", i, n[i], o[i], l[i]);
        }
        let _ = writeln!(
            s,
            "{:>8} {:>12} {:>12} {:>12}",
            "total",
            self.none.hp_bytes(),
            self.opt.hp_bytes(),
            self.lc.hp_bytes()
        );
        let _ = writeln!(
            s,
            "savings abs: opt {} lc {}   rel: opt {:.3}% lc {:.3}%   rel LC/OPT {:.3}%   agreement {:.3}",
            self.savings_abs(DecisionMode::Opt),
            self.savings_abs(DecisionMode::Lc),
            100.0 * self.savings_rel(DecisionMode::Opt),
            100.0 * self.savings_rel(DecisionMode::Lc),
            self.rel_lc_opt_percent(),
            self.agreement()
        );
        s
    }

    /// Line-oriented `key=value` form with a fixed key set.
    pub fn key_values(&self) -> String {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k}={v}");
        };
        kv("frames", self.frames.to_string());
        kv("hp_frames", self.hp_frames().to_string());
        kv("candidates_per_frame", self.candidates_per_frame().to_string());
        for r in [&self.none, &self.opt, &self.lc] {
            let m = r.mode;
            kv(&format!("size_{m}"), r.hp_bytes().to_string());
            kv(&format!("payload_{m}"), r.stats.hp_payload_bytes.to_string());
            kv(&format!("signaling_{m}"), r.stats.signaling_bytes.to_string());
            kv(&format!("total_{m}"), r.stats.total_bytes.to_string());
            kv(&format!("resorted_{m}"), r.stats.resorted_bands().to_string());
        }
        for m in [DecisionMode::Opt, DecisionMode::Lc] {
            kv(&format!("savings_abs_{m}"), self.savings_abs(m).to_string());
            kv(&format!("savings_rel_{m}"), format!("{:.6}", self.savings_rel(m)));
        }
        kv("rel_lc_opt_percent", format!("{:.3}", self.rel_lc_opt_percent()));
        kv("agreement", format!("{:.6}", self.agreement()));
        kv("dominance", if self.dominance_holds() { "ok" } else { "violated" }.into());
        s
    }
}

/// LC statistic and both rates of one candidate band.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BandAnalysis {
    pub orientation: Orientation,
    pub level: usize,
    pub quotient: Quotient,
    pub threshold_milli: u16,
    pub rate_original: u64,
    pub rate_resorted: u64,
    pub lc: bool,
    pub opt: bool,
}

pub fn analyze_pyramid(p: &SubbandPyramid, config: &EncoderConfig) -> Result<Vec<BandAnalysis>> {
    let params = config.resort_params()?;
    params
        .candidates(p.levels())
        .into_iter()
        .map(|(o, l)| {
            let sb = p.band(o, l);
            let (rows, cols) = boundary_sets_for(sb, params.block_size)?;
            let quotient = lc_statistic(sb, rows.as_ref(), cols.as_ref())?;
            let threshold_milli = params.thresholds.milli(o, l);
            let rate_original = subband_rate(&sb.coeffs, config.cb_size)?;
            let rate_resorted = subband_rate(&resort(sb, rows.as_ref(), cols.as_ref())?.coeffs, config.cb_size)?;
            Ok(BandAnalysis {
                orientation: o,
                level: l,
                quotient,
                threshold_milli,
                rate_original,
                rate_resorted,
                lc: quotient.below_milli(threshold_milli),
                opt: rate_resorted < rate_original,
            })
        })
        .collect()
}

/// Analysis of HP frame `frame`, counted across temporal levels.
pub fn analyze_frame(v: &Volume, config: &EncoderConfig, frame: usize) -> Result<Vec<BandAnalysis>> {
    let d = temporal_decomposition(v, config)?;
    let count = d.hp_count();
    let hp = d
        .hp_frames()
        .nth(frame)
        .ok_or_else(|| Error::param(format!("HP frame {frame} out of range (volume has {count})")))?;
    let levels = effective_levels(v.width(), v.height(), config.spatial_levels);
    analyze_pyramid(&forward_2d(hp, levels)?, config)
}

pub fn format_analysis(rows: &[BandAnalysis]) -> String {
    let mut s = format!(
        "{:<5} {:>9} {:>6} {:>10} {:>10} {:>4} {:>4}\n",
        "band", "Q", "theta", "rate", "resorted", "LC", "OPT"
    );
    for r in rows {
        let _ = writeln!(
            s,
            "{:<5} {:>9} {:>6.3} {:>10} {:>10} {:>4} {:>4}",
            format!("{}{}", r.orientation, r.level),
            r.quotient.to_string(),
            r.threshold_milli as f64 / 1000.0,
            r.rate_original,
            r.rate_resorted,
            r.lc as u8,
            r.opt as u8
        );
    }
    s
}
