//! Published values of the bound tables, and per-cell comparison against a
//! computed table.
//!
//! Tables 1, 2 and 4 list weighted upper and lower values at
//! `u ∈ {3, 2.5, 2, 1.5, 1}` for every level up to `k_{n+1}` (the top level
//! has no upper value). Tables 3 and 5 list the weight-zero row on a finer
//! u-list.

use serde::Serialize;

use crate::table::BoundTable;

/// The u-columns of the level tables.
pub const LEVEL_TABLE_U: [f64; 5] = [3.0, 2.5, 2.0, 1.5, 1.0];

/// Default per-cell tolerance.
pub const TOLERANCE: f64 = 5e-3;

/// One level: `cells[2j]` is the upper value and `cells[2j+1]` the lower
/// value at `LEVEL_TABLE_U[j]`.
#[derive(Debug, Clone, Copy)]
pub struct KRow {
    pub k: f64,
    pub cells: [Option<f64>; 10],
}

#[derive(Debug, Clone, Copy)]
pub struct URow {
    pub u: f64,
    pub w_upper: f64,
    pub w_lower: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Serialize)]
pub struct CellDeviation {
    pub table: u8,
    pub k: f64,
    pub u: f64,
    pub side: Side,
    pub printed: f64,
    pub computed: f64,
    pub delta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeviationReport {
    pub table: u8,
    pub tolerance: f64,
    pub cells: usize,
    pub within: usize,
    /// Every cell off by more than the tolerance.
    pub deviations: Vec<CellDeviation>,
}

impl DeviationReport {
    pub fn fraction_within(&self) -> f64 {
        if self.cells == 0 {
            1.0
        } else {
            self.within as f64 / self.cells as f64
        }
    }

    /// Merges several reports into one (the table id of the first is kept).
    pub fn combine(reports: &[DeviationReport]) -> DeviationReport {
        let mut out = DeviationReport {
            table: reports.first().map_or(0, |r| r.table),
            tolerance: reports.first().map_or(TOLERANCE, |r| r.tolerance),
            cells: 0,
            within: 0,
            deviations: Vec::new(),
        };
        for r in reports {
            out.cells += r.cells;
            out.within += r.within;
            out.deviations.extend(r.deviations.iter().cloned());
        }
        out
    }
}

fn lookup(t: &BoundTable, k: f64, u: f64, side: Side) -> Option<f64> {
    let l = t.grid.level_of(k)?;
    match side {
        Side::Upper => t.try_upper(l, u).ok(),
        Side::Lower => t.try_lower(l, u).ok(),
    }
}

fn push(rep: &mut DeviationReport, k: f64, u: f64, side: Side, printed: f64, computed: Option<f64>) {
    rep.cells += 1;
    let computed = computed.unwrap_or(f64::NAN);
    let delta = computed - printed;
    if delta.abs() <= rep.tolerance {
        rep.within += 1;
    } else {
        rep.deviations.push(CellDeviation { table: rep.table, k, u, side, printed, computed, delta });
    }
}

/// Compares a level table (1, 2 or 4) against `t`.
pub fn compare_levels(id: u8, printed: &[KRow], t: &BoundTable, tolerance: f64) -> DeviationReport {
    let mut rep = DeviationReport { table: id, tolerance, cells: 0, within: 0, deviations: Vec::new() };
    for row in printed {
        for (j, &u) in LEVEL_TABLE_U.iter().enumerate() {
            for (side, cell) in [(Side::Upper, row.cells[2 * j]), (Side::Lower, row.cells[2 * j + 1])] {
                if let Some(p) = cell {
                    push(&mut rep, row.k, u, side, p, lookup(t, row.k, u, side));
                }
            }
        }
    }
    rep
}

/// Compares a weight-zero table (3 or 5) against `t`.
pub fn compare_zero_row(id: u8, printed: &[URow], t: &BoundTable, tolerance: f64) -> DeviationReport {
    let mut rep = DeviationReport { table: id, tolerance, cells: 0, within: 0, deviations: Vec::new() };
    for row in printed {
        push(&mut rep, 0.0, row.u, Side::Upper, row.w_upper, lookup(t, 0.0, row.u, Side::Upper));
        push(&mut rep, 0.0, row.u, Side::Lower, row.w_lower, lookup(t, 0.0, row.u, Side::Lower));
    }
    rep
}

/// u-values of a weight-zero table, in printed order.
pub fn zero_row_u(printed: &[URow]) -> Vec<f64> {
    printed.iter().map(|r| r.u).collect()
}

/// Levels after the α = 2 phase.
pub const TABLE1: [KRow; 18] = [
    KRow { k: 4.5, cells: [None, Some(1.96635), None, Some(1.67752), None, Some(1.28813), None, Some(0.70587), None, Some(0.0)] },
    KRow { k: 4.0, cells: [Some(2.15054), Some(1.95519), Some(2.02792), Some(1.66557), Some(1.99927), Some(1.27638), Some(3.48815), Some(0.63944), Some(7.74209), Some(0.0)] },
    KRow { k: 3.75, cells: [Some(2.12684), Some(1.94961), Some(2.00342), Some(1.6596), Some(1.97867), Some(1.27052), Some(3.25499), Some(0.60623), Some(7.24307), Some(0.0)] },
    KRow { k: 3.5, cells: [Some(2.10295), Some(1.91658), Some(1.97861), Some(1.61773), Some(1.95809), Some(1.22884), Some(3.02183), Some(0.56581), Some(6.6744), Some(0.0)] },
    KRow { k: 3.25, cells: [Some(2.08865), Some(1.88156), Some(1.96646), Some(1.56967), Some(1.94637), Some(1.18084), Some(2.79741), Some(0.5254), Some(6.25374), Some(0.0)] },
    KRow { k: 3.0, cells: [Some(2.07414), Some(1.84654), Some(1.95397), Some(1.51728), Some(1.93465), Some(1.12785), Some(2.57543), Some(0.48498), Some(5.76573), Some(0.0)] },
    KRow { k: 2.75, cells: [Some(2.06162), Some(1.81152), Some(1.94537), Some(1.46425), Some(1.92659), Some(1.06885), Some(2.35346), Some(0.44457), Some(5.27772), Some(0.0)] },
    KRow { k: 2.5, cells: [Some(2.04885), Some(1.7765), Some(1.9364), Some(1.41122), Some(1.91853), Some(1.00295), Some(2.13149), Some(0.40415), Some(4.7897), Some(0.0)] },
    KRow { k: 2.25, cells: [Some(2.03817), Some(1.74147), Some(1.93415), Some(1.3582), Some(1.91807), Some(0.92819), Some(1.91837), Some(0.36374), Some(4.31075), Some(0.0)] },
    KRow { k: 2.0, cells: [Some(2.02748), Some(1.70645), Some(1.9319), Some(1.30516), Some(1.91761), Some(0.84215), Some(1.91761), Some(0.32332), Some(3.83178), Some(0.0)] },
    KRow { k: 1.75, cells: [Some(2.0168), Some(1.67143), Some(1.92965), Some(1.25213), Some(1.91714), Some(0.7502), Some(1.91714), Some(0.2829), Some(3.35282), Some(0.0)] },
    KRow { k: 1.5, cells: [Some(2.00611), Some(1.63641), Some(1.9274), Some(1.1991), Some(1.91668), Some(0.65825), Some(1.91668), Some(0.24249), Some(2.87389), Some(0.0)] },
    KRow { k: 1.25, cells: [Some(1.99543), Some(1.60138), Some(1.92515), Some(1.14607), Some(1.91622), Some(0.56629), Some(1.91622), Some(0.20207), Some(2.39495), Some(0.0)] },
    KRow { k: 1.0, cells: [Some(1.98475), Some(1.56637), Some(1.9229), Some(1.09305), Some(1.91576), Some(0.47434), Some(1.91576), Some(0.16166), Some(1.91602), Some(0.0)] },
    KRow { k: 0.75, cells: [Some(1.97406), Some(1.53134), Some(1.92065), Some(1.04002), Some(1.91529), Some(0.38198), Some(1.91529), Some(0.12125), Some(1.91529), Some(0.0)] },
    KRow { k: 0.5, cells: [Some(1.96338), Some(1.49632), Some(1.9184), Some(0.98699), Some(1.91483), Some(0.28962), Some(1.91483), Some(0.08083), Some(1.91483), Some(0.0)] },
    KRow { k: 0.25, cells: [Some(1.95269), Some(1.4613), Some(1.91615), Some(0.93396), Some(1.91437), Some(0.19726), Some(1.91437), Some(0.04041), Some(1.91437), Some(0.0)] },
    KRow { k: 0.0, cells: [Some(1.94201), Some(1.42628), Some(1.9139), Some(0.88809), Some(1.9139), Some(0.1049), Some(1.9139), Some(0.0), Some(1.9139), Some(0.0)] },
];

/// Levels after the exponent bootstrap.
pub const TABLE2: [KRow; 18] = [
    KRow { k: 4.5, cells: [None, Some(1.97453), None, Some(1.68857), None, Some(1.30463), None, Some(0.72792), None, Some(0.0)] },
    KRow { k: 4.0, cells: [Some(2.14267), Some(1.96384), Some(2.01741), Some(1.67727), Some(1.99419), Some(1.29362), Some(3.45385), Some(0.66592), Some(7.62429), Some(0.0)] },
    KRow { k: 3.75, cells: [Some(2.11819), Some(1.95849), Some(1.99171), Some(1.67161), Some(1.96864), Some(1.28812), Some(3.22027), Some(0.63491), Some(7.13005), Some(0.0)] },
    KRow { k: 3.5, cells: [Some(2.093361), Some(1.92817), Some(1.96583), Some(1.63301), Some(1.943359), Some(1.24989), Some(2.98668), Some(0.59687), Some(6.63582), Some(0.0)] },
    KRow { k: 3.25, cells: [Some(2.07708), Some(1.89786), Some(1.95059), Some(1.59028), Some(1.92889), Some(1.20735), Some(2.76343), Some(0.55452), Some(6.15192), Some(0.0)] },
    KRow { k: 3.0, cells: [Some(2.06046), Some(1.86754), Some(1.93519), Some(1.54486), Some(1.9142), Some(1.15984), Some(2.54245), Some(0.51186), Some(5.67028), Some(0.0)] },
    KRow { k: 2.75, cells: [Some(2.04534), Some(1.83723), Some(1.92323), Some(1.49944), Some(1.90294), Some(1.10631), Some(2.32147), Some(0.46921), Some(5.18865), Some(0.0)] },
    KRow { k: 2.5, cells: [Some(2.03013), Some(1.80691), Some(1.91113), Some(1.45402), Some(1.89168), Some(1.04593), Some(2.10049), Some(0.42655), Some(4.70702), Some(0.0)] },
    KRow { k: 2.25, cells: [Some(2.01723), Some(1.7766), Some(1.90779), Some(1.40859), Some(1.89018), Some(0.9769), Some(1.89044), Some(0.3839), Some(4.2363), Some(0.0)] },
    KRow { k: 2.0, cells: [Some(2.00432), Some(1.74628), Some(1.90445), Some(1.36317), Some(1.88868), Some(0.89681), Some(1.88868), Some(0.34124), Some(3.76557), Some(0.0)] },
    KRow { k: 1.75, cells: [Some(1.99142), Some(1.71596), Some(1.90111), Some(1.31775), Some(1.88718), Some(0.81618), Some(1.8718), Some(0.29859), Some(3.29484), Some(0.0)] },
    KRow { k: 1.5, cells: [Some(1.97851), Some(1.68565), Some(1.89777), Some(1.27233), Some(1.88569), Some(0.73558), Some(1.88569), Some(0.25593), Some(2.82414), Some(0.0)] },
    KRow { k: 1.25, cells: [Some(1.96851), Some(1.65533), Some(1.89443), Some(1.2269), Some(1.88419), Some(0.665493), Some(1.88419), Some(0.21327), Some(2.35343), Some(0.0)] },
    KRow { k: 1.0, cells: [Some(1.9527), Some(1.62502), Some(1.89108), Some(1.18148), Some(1.88269), Some(0.5743), Some(1.88269), Some(0.17062), Some(1.88273), Some(0.0)] },
    KRow { k: 0.75, cells: [Some(1.9398), Some(1.5947), Some(1.88774), Some(1.13606), Some(1.88119), Some(0.49044), Some(1.88119), Some(0.12796), Some(1.88119), Some(0.0)] },
    KRow { k: 0.5, cells: [Some(1.92689), Some(1.56439), Some(1.8844), Some(1.09064), Some(1.87969), Some(0.40658), Some(1.87969), Some(0.08531), Some(1.87969), Some(0.0)] },
    KRow { k: 0.25, cells: [Some(1.91399), Some(1.53407), Some(1.88106), Some(1.04522), Some(1.8782), Some(0.32272), Some(1.8782), Some(0.04265), Some(1.8782), Some(0.0)] },
    KRow { k: 0.0, cells: [Some(1.90109), Some(1.50375), Some(1.87772), Some(0.99979), Some(1.8767), Some(0.23886), Some(1.8767), Some(0.0), Some(1.8767), Some(0.0)] },
];

/// Weight-zero row after the bootstrap.
pub const TABLE3: [URow; 33] = [
    URow { u: 5.0, w_upper: 2.810476, w_lower: 2.804123 },
    URow { u: 4.9, w_upper: 2.755139, w_lower: 2.747114 },
    URow { u: 4.8, w_upper: 2.700062, w_lower: 2.689884 },
    URow { u: 4.7, w_upper: 2.645264, w_lower: 2.632382 },
    URow { u: 4.6, w_upper: 2.590828, w_lower: 2.574554 },
    URow { u: 4.5, w_upper: 2.536905, w_lower: 2.5163 },
    URow { u: 4.4, w_upper: 2.483362, w_lower: 2.457531 },
    URow { u: 4.3, w_upper: 2.430558, w_lower: 2.398088 },
    URow { u: 4.2, w_upper: 2.37849, w_lower: 2.337796 },
    URow { u: 4.1, w_upper: 2.327326, w_lower: 2.276432 },
    URow { u: 4.0, w_upper: 2.276645, w_lower: 2.21781 },
    URow { u: 3.9, w_upper: 2.227293, w_lower: 2.153511 },
    URow { u: 3.8, w_upper: 2.179677, w_lower: 2.08706 },
    URow { u: 3.7, w_upper: 2.133011, w_lower: 2.022424 },
    URow { u: 3.6, w_upper: 2.088863, w_lower: 1.951076 },
    URow { u: 3.5, w_upper: 2.046887, w_lower: 1.885336 },
    URow { u: 3.4, w_upper: 2.008704, w_lower: 1.808683 },
    URow { u: 3.3, w_upper: 1.974608, w_lower: 1.728772 },
    URow { u: 3.2, w_upper: 1.945059, w_lower: 1.655096 },
    URow { u: 3.1, w_upper: 1.921803, w_lower: 1.567792 },
    URow { u: 3.0, w_upper: 1.901086, w_lower: 1.503759 },
    URow { u: 2.9, w_upper: 1.893859, w_lower: 1.407497 },
    URow { u: 2.8, w_upper: 1.893647, w_lower: 1.306029 },
    URow { u: 2.7, w_upper: 1.892139, w_lower: 1.226451 },
    URow { u: 2.6, w_upper: 1.887881, w_lower: 1.112676 },
    URow { u: 2.5, w_upper: 1.877724, w_lower: 0.999797 },
    URow { u: 2.4, w_upper: 1.877724, w_lower: 0.870318 },
    URow { u: 2.3, w_upper: 1.877175, w_lower: 0.73124 },
    URow { u: 2.2, w_upper: 1.876697, w_lower: 0.581023 },
    URow { u: 2.1, w_upper: 1.876697, w_lower: 0.417728 },
    URow { u: 2.0, w_upper: 1.876697, w_lower: 0.238863 },
    URow { u: 1.9, w_upper: 1.876697, w_lower: 0.041132 },
    URow { u: 1.8, w_upper: 1.876697, w_lower: 0.0 },
];

/// Levels after the double sieve.
pub const TABLE4: [KRow; 18] = [
    KRow { k: 4.5, cells: [None, Some(1.98678), None, Some(1.72368), None, Some(1.45786), None, Some(0.87942), None, Some(0.0)] },
    KRow { k: 4.0, cells: [Some(2.1278), Some(1.98678), Some(1.97904), Some(1.72368), Some(1.92609), Some(1.45786), Some(3.45385), Some(0.87942), Some(7.62429), Some(0.0)] },
    KRow { k: 3.75, cells: [Some(2.08345), Some(1.98678), Some(1.91941), Some(1.72368), Some(1.88222), Some(1.45787), Some(2.66467), Some(0.87942), Some(3.88369), Some(0.0)] },
    KRow { k: 3.5, cells: [Some(2.0638), Some(1.95927), Some(1.89666), Some(1.6862), Some(1.83588), Some(1.43309), Some(2.5099), Some(0.87942), Some(3.69096), Some(0.0)] },
    KRow { k: 3.25, cells: [Some(2.0459), Some(1.93176), Some(1.8768), Some(1.64872), Some(1.80742), Some(1.39642), Some(2.35513), Some(0.87942), Some(3.49502), Some(0.0)] },
    KRow { k: 3.0, cells: [Some(2.02717), Some(1.90425), Some(1.85984), Some(1.61124), Some(1.78239), Some(1.33625), Some(2.20035), Some(0.87942), Some(3.29908), Some(0.0)] },
    KRow { k: 2.75, cells: [Some(2.00935), Some(1.87674), Some(1.84315), Some(1.57376), Some(1.7601), Some(1.27608), Some(2.04558), Some(0.87942), Some(3.10314), Some(0.0)] },
    KRow { k: 2.5, cells: [Some(1.9991), Some(1.84923), Some(1.82406), Some(1.53628), Some(1.7414), Some(1.21591), Some(1.8908), Some(0.87942), Some(2.9072), Some(0.0)] },
    KRow { k: 2.25, cells: [Some(1.97322), Some(1.82172), Some(1.81642), Some(1.49881), Some(1.73603), Some(1.15574), Some(1.73603), Some(0.87942), Some(2.71126), Some(0.0)] },
    KRow { k: 2.0, cells: [Some(1.95545), Some(1.79421), Some(1.80879), Some(1.46133), Some(1.7342), Some(1.09557), Some(1.7342), Some(0.78174), Some(2.51532), Some(0.0)] },
    KRow { k: 1.75, cells: [Some(1.93768), Some(1.7667), Some(1.80115), Some(1.42385), Some(1.73354), Some(1.0354), Some(1.73354), Some(0.68402), Some(2.31938), Some(0.0)] },
    KRow { k: 1.5, cells: [Some(1.9199), Some(1.73919), Some(1.79351), Some(1.38638), Some(1.73288), Some(0.97523), Some(1.73288), Some(0.5863), Some(2.12343), Some(0.0)] },
    KRow { k: 1.25, cells: [Some(1.90213), Some(1.71168), Some(1.78587), Some(1.34889), Some(1.73221), Some(0.91506), Some(1.73221), Some(0.48859), Some(1.92749), Some(0.0)] },
    KRow { k: 1.0, cells: [Some(1.88436), Some(1.68417), Some(1.77823), Some(1.31142), Some(1.73155), Some(0.85489), Some(1.73155), Some(0.39087), Some(1.73155), Some(0.0)] },
    KRow { k: 0.75, cells: [Some(1.86659), Some(1.65666), Some(1.77059), Some(1.27394), Some(1.73089), Some(0.79471), Some(1.73089), Some(0.29315), Some(1.73089), Some(0.0)] },
    KRow { k: 0.5, cells: [Some(1.84882), Some(1.62915), Some(1.76295), Some(1.23646), Some(1.73023), Some(0.73454), Some(1.73023), Some(0.19543), Some(1.73023), Some(0.0)] },
    KRow { k: 0.25, cells: [Some(1.83104), Some(1.60164), Some(1.75531), Some(1.19898), Some(1.72957), Some(0.67437), Some(1.72957), Some(0.09771), Some(1.72957), Some(0.0)] },
    KRow { k: 0.0, cells: [Some(1.81327), Some(1.57413), Some(1.74767), Some(1.1615), Some(1.72891), Some(0.6142), Some(1.72891), Some(0.0), Some(1.72891), Some(0.0)] },
];

/// Weight-zero row after the double sieve.
pub const TABLE5: [URow; 39] = [
    URow { u: 5.0, w_upper: 2.80888, w_lower: 2.805636 },
    URow { u: 4.9, w_upper: 2.753155, w_lower: 2.749037 },
    URow { u: 4.8, w_upper: 2.697544, w_lower: 2.692357 },
    URow { u: 4.7, w_upper: 2.642076, w_lower: 2.635561 },
    URow { u: 4.6, w_upper: 2.586792, w_lower: 2.578614 },
    URow { u: 4.5, w_upper: 2.531744, w_lower: 2.521477 },
    URow { u: 4.4, w_upper: 2.476986, w_lower: 2.464103 },
    URow { u: 4.3, w_upper: 2.422583, w_lower: 2.406434 },
    URow { u: 4.2, w_upper: 2.368612, w_lower: 2.348405 },
    URow { u: 4.1, w_upper: 2.315164, w_lower: 2.289931 },
    URow { u: 4.0, w_upper: 2.262342, w_lower: 2.230915 },
    URow { u: 3.9, w_upper: 2.210264, w_lower: 2.171225 },
    URow { u: 3.8, w_upper: 2.159074, w_lower: 2.110724 },
    URow { u: 3.7, w_upper: 2.108948, w_lower: 2.049196 },
    URow { u: 3.6, w_upper: 2.060095, w_lower: 1.986305 },
    URow { u: 3.5, w_upper: 2.012771, w_lower: 1.921903 },
    URow { u: 3.4, w_upper: 1.96729, w_lower: 1.856157 },
    URow { u: 3.3, w_upper: 1.924047, w_lower: 1.788645 },
    URow { u: 3.2, w_upper: 1.883539, w_lower: 1.71921 },
    URow { u: 3.1, w_upper: 1.846355, w_lower: 1.647753 },
    URow { u: 3.0, w_upper: 1.813272, w_lower: 1.574131 },
    URow { u: 2.9, w_upper: 1.7864, w_lower: 1.498156 },
    URow { u: 2.8, w_upper: 1.76849, w_lower: 1.419319 },
    URow { u: 2.7, w_upper: 1.761952, w_lower: 1.337257 },
    URow { u: 2.6, w_upper: 1.761952, w_lower: 1.251518 },
    URow { u: 2.5, w_upper: 1.747668, w_lower: 1.161508 },
    URow { u: 2.4, w_upper: 1.747668, w_lower: 1.081561 },
    URow { u: 2.3, w_upper: 1.747668, w_lower: 0.981977 },
    URow { u: 2.2, w_upper: 1.746616, w_lower: 0.875651 },
    URow { u: 2.1, w_upper: 1.740615, w_lower: 0.76128 },
    URow { u: 2.0, w_upper: 1.728908, w_lower: 0.637005 },
    URow { u: 1.9, w_upper: 1.728908, w_lower: 0.459369 },
    URow { u: 1.8, w_upper: 1.728908, w_lower: 0.260835 },
    URow { u: 1.702, w_upper: 1.728908, w_lower: 0.0024275 },
    URow { u: 1.6, w_upper: 1.728908, w_lower: 0.0 },
    URow { u: 1.5, w_upper: 1.728908, w_lower: 0.0 },
    URow { u: 1.4, w_upper: 1.728908, w_lower: 0.0 },
    URow { u: 1.3, w_upper: 1.728908, w_lower: 0.0 },
    URow { u: 1.2, w_upper: 1.728908, w_lower: 0.0 },
];
