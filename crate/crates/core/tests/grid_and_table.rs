use sieve_bounds::classical::tilde_F;
use sieve_bounds::numerics::exp_neg_gamma;
use sieve_bounds::part1::init_tables;
use sieve_bounds::table::{beta_split, build_kgrid, emit_csv, emit_rows, parse_csv, table_rows, BoundTable, CsvRow};

#[test]
fn kgrid_levels() {
    let g = build_kgrid(2.0, 16);
    assert_eq!(g.k(1), 0.25);
    assert_eq!(g.k(8), 2.0);
    assert_eq!(g.k(16), 4.0);
    assert_eq!(&g.levels[17..], &[4.5, 8.0, 10.125, 12.5, 15.125]);
    let g3 = build_kgrid(3.0, 16);
    assert!((g3.k(17) - 10.85482).abs() < 5e-6);
}

#[test]
fn beta_split_examples() {
    let g = build_kgrid(2.0, 16);
    let s = beta_split(&g, g.k(3)).unwrap();
    assert_eq!(s.beta, 1.0);
    assert_eq!(s.k_hi, g.k(3));
    let s = beta_split(&g, 0.3).unwrap();
    assert_eq!((s.k_lo, s.k_hi), (0.25, 0.5));
    assert!((s.beta - 0.2).abs() < 1e-12);
    let s = beta_split(&g, 0.0).unwrap();
    assert_eq!(s.beta, 0.0);
}

#[test]
fn initial_top_row_is_selberg_bound() {
    let t = init_tables(build_kgrid(2.0, 16), 0.01, 10.0);
    let i = t.index_of(2.0).unwrap();
    let selberg = exp_neg_gamma() * 2.0 * tilde_F(2.0).unwrap();
    assert!((selberg - 2.0).abs() < 1e-9);
    assert!((t.w_upper[16][i] - selberg).abs() < 1e-12);
    assert!((t.w_upper[0][i] - 2.0).abs() < 1e-9);
    assert_eq!(t.w_lower[0][i], 0.0);
}

#[test]
fn initial_table_is_ordered() {
    let t = init_tables(build_kgrid(2.0, 16), 0.01, 10.0);
    for l in 0..=t.grid.n {
        for i in 0..t.len() {
            assert!(t.w_upper[l][i] >= t.w_lower[l][i], "level {l}, u = {}", t.u_samples[i]);
        }
    }
}

#[test]
fn breve_mixes_neighbouring_rows() {
    let t = init_tables(build_kgrid(2.0, 16), 0.01, 10.0);
    let i = t.index_of(2.5).unwrap();
    let mixed = t.breve_upper_weighted(0.3, 2.5).unwrap();
    assert!((mixed - (0.2 * t.w_upper[2][i] + 0.8 * t.w_upper[1][i])).abs() < 1e-14);
    assert!((t.breve_F(0.3, 2.5).unwrap() - mixed / t.grid.weight_k(0.3, 2.5)).abs() < 1e-14);
    assert_eq!(t.breve_upper_weighted(0.5, 2.5).unwrap(), t.w_upper[2][i]);
}

#[test]
fn csv_emission() {
    let rows = [CsvRow { u: 1.0, k: 0.0, w_upper: Some(1.91390), w_lower: 0.0 }];
    assert_eq!(emit_rows(&rows), "u,k,wF,wf\n1.000000,0.000000,1.913900,0.000000\n");
    assert_eq!(emit_rows(&[]), "u,k,wF,wf\n");
}

#[test]
fn csv_round_trip_of_a_table() {
    let t = init_tables(build_kgrid(2.0, 16), 0.05, 10.0);
    let text = emit_csv(&t);
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), t.len() * (t.grid.top() + 1));
    let expect = table_rows(&t, None);
    for r in &rows {
        let e = expect.iter().find(|e| (e.u - r.u).abs() < 1e-9 && (e.k - r.k).abs() < 1e-9).unwrap();
        assert!((e.w_lower - r.w_lower).abs() <= 5e-7);
        assert_eq!(e.w_upper.is_some(), r.w_upper.is_some());
        if let (Some(a), Some(b)) = (e.w_upper, r.w_upper) {
            assert!((a - b).abs() <= 5e-7);
        }
    }
    assert!(parse_csv("u,k,wF\n").is_err());
}

#[test]
fn checkpoint_round_trip() {
    let t = init_tables(build_kgrid(2.0, 16), 0.05, 10.0);
    assert_eq!(BoundTable::from_json(&t.to_json()).unwrap(), t);
    assert!(BoundTable::from_json("not json").is_err());
}
