use super::*;
use crate::model::StatechartBuilder;
use crate::samples::fig1;

fn tv(s: &str) -> TernaryBitVector {
    s.parse().unwrap()
}

#[test]
fn running_example_layout() {
    let sc = fig1(Some((0, 7)));
    let l = EncodingLayout::build(&sc);
    assert_eq!(l.width(), 6);
    assert_eq!(l.level_bits(), &[1, 3, 2]);
    assert_eq!(l.level_width(3), 0);
    let enc = |n: &str| l.format(&l.encode_state(sc.state_id(n).unwrap()));
    assert_eq!(enc("A"), "0.XXX.XX");
    assert_eq!(enc("B"), "1.XXX.XX");
    assert_eq!(enc("B1"), "1.XX0.XX");
    assert_eq!(enc("B2"), "1.XX1.XX");
    assert_eq!(enc("A1c"), "0.10X.XX");
    assert_eq!(enc("A2b2"), "0.XX1.X1");
    assert!(l.dump().contains("A1c = 0.10X.XX\n"));
}

#[test]
fn region_and_level_bits() {
    let sc = fig1(Some((0, 7)));
    let r = |n: &str| region_bits(&sc, sc.region_id(n).unwrap()).unwrap();
    assert_eq!(r("A1"), 2);
    assert_eq!(r("A2"), 1);
    assert_eq!(r("A2bR"), 1);
    assert!(region_bits(&sc, RegionId(40)).is_err());
    assert_eq!(level_bits(&sc, 1), 3);
    assert_eq!(level_bits(&sc, 2), 2);
    assert_eq!(level_bits(&sc, 3), 0);
    assert_eq!(ceil_log2(1), 0);
    assert_eq!(ceil_log2(3), 2);
    assert_eq!(ceil_log2(4), 2);
    assert_eq!(ceil_log2(5), 3);
}

#[test]
fn single_state_region_needs_no_bits() {
    let mut b = StatechartBuilder::new("m");
    let r = b.region("r", None);
    b.initial_state("a", r);
    let sc = b.build().unwrap();
    assert_eq!(region_bits(&sc, r).unwrap(), 0);
    assert_eq!(EncodingLayout::build(&sc).width(), 0);
}

#[test]
fn flat_and_parallel_widths() {
    let mut b = StatechartBuilder::new("flat");
    let r = b.region("r", None);
    b.initial_state("a", r);
    b.state("b", r);
    assert_eq!(EncodingLayout::build(&b.build().unwrap()).width(), 1);

    let mut b = StatechartBuilder::new("par");
    for i in 0..4 {
        let r = b.region(format!("r{i}"), None);
        b.initial_state(format!("s{i}_0"), r);
        for j in 1..4 {
            b.state(format!("s{i}_{j}"), r);
        }
    }
    assert_eq!(EncodingLayout::build(&b.build().unwrap()).width(), 8);
}

#[test]
fn active_set_encoding() {
    let sc = fig1(Some((0, 7)));
    let l = EncodingLayout::build(&sc);
    let ids = |ns: &[&str]| ns.iter().map(|n| sc.state_id(n).unwrap()).collect::<Vec<_>>();
    let v = l.encode_active_set(&ids(&["A", "A1c", "A2b", "A2b2"])).unwrap();
    assert_eq!(l.format(&v), "0.101.X1");
    let v = l.encode_active_set(&ids(&["A", "A1a", "A2a"])).unwrap();
    assert_eq!(l.format(&v), "0.000.XX");
    assert!(matches!(
        l.encode_active_set(&ids(&["A", "B"])),
        Err(EncodingError::Conflict { position: 1 })
    ));
    let a1a = l.encode_state(sc.state_id("A1a").unwrap());
    let a1b = l.encode_state(sc.state_id("A1b").unwrap());
    assert!(a1a.conflicting(&a1b).unwrap());
}

#[test]
fn target_encoding_clamps_own_subtree_only() {
    let sc = fig1(Some((0, 7)));
    let l = EncodingLayout::build(&sc);
    let t = |n: &str| l.format(&l.encode_target(sc.state_id(n).unwrap()));
    assert_eq!(t("B"), "1.XX0.00");
    assert_eq!(t("A2b"), "0.XX1.X0");
    assert_eq!(t("B2c"), l.format(&l.encode_state(sc.state_id("B2c").unwrap())));
    assert_eq!(
        l.format(&l.encode_target_literal(sc.state_id("A2b").unwrap())),
        "0.001.00"
    );
}

#[test]
fn decoding() {
    let sc = fig1(Some((0, 7)));
    let l = EncodingLayout::build(&sc);
    let names = |set: BTreeSet<StateId>| {
        set.into_iter()
            .map(|s| sc.state(s).name.clone())
            .collect::<Vec<_>>()
    };
    assert_eq!(names(l.decode(&tv("0.101.01")).unwrap()), ["A", "A1c", "A2b", "A2b2"]);
    assert_eq!(names(l.decode(&tv("0.101.X1")).unwrap()), ["A", "A1c", "A2b", "A2b2"]);
    assert_eq!(names(l.decode(&tv("1.000.00")).unwrap()), ["B", "B1"]);
    assert_eq!(
        l.decode(&tv("000000")).unwrap(),
        sc.initial_configuration().active
    );
    // Code 3 is unused in A1.
    assert!(matches!(l.decode(&tv("0.110.00")), Err(EncodingError::Decode(_))));
    assert!(l.decode(&tv("0")).is_err());
}

#[test]
fn live_positions_follow_active_branches() {
    let sc = fig1(Some((0, 7)));
    let l = EncodingLayout::build(&sc);
    let b_b1: BTreeSet<_> = ["B", "B1"].iter().map(|n| sc.state_id(n).unwrap()).collect();
    assert_eq!(l.live_positions(&b_b1), vec![0, 3]);
}

#[test]
fn parallel_composites_at_same_depth_do_not_share_bits() {
    // Both P1 and P2 are active at once and each has a two-state region.
    let mut b = StatechartBuilder::new("m");
    let top = b.region("top", None);
    let p = b.initial_state("P", top);
    let r1 = b.region("R1", Some(p));
    let r2 = b.region("R2", Some(p));
    let p1 = b.initial_state("P1", r1);
    let p2 = b.initial_state("P2", r2);
    let q1 = b.region("Q1", Some(p1));
    b.initial_state("a", q1);
    b.state("a2", q1);
    let q2 = b.region("Q2", Some(p2));
    b.initial_state("c", q2);
    b.state("c2", q2);
    let sc = b.build().unwrap();
    let l = EncodingLayout::build(&sc);
    assert_eq!(l.level_bits(), &[0, 0, 2]);
    let a2 = sc.state_id("a2").unwrap();
    let c2 = sc.state_id("c2").unwrap();
    let v = l.encode_active_set(&[p, p1, p2, a2, c2]).unwrap();
    assert_eq!(v.to_string(), "11");
    assert_eq!(l.decode(&v).unwrap(), [p, p1, p2, a2, c2].into_iter().collect());
}
