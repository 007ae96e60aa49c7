use mpal::emsa::{
    classify_cube, decay_parameter_schedule, disjoint_projection_check, initial_scale, mass_threshold, run_emsa_seed,
    scale_schedule, tensor_check, weak_separability, EmsaReport, EmsaSetup, InteractivityVerdict,
};
use mpal::geometry::{Configuration, Cube};
use mpal::hamiltonian::{Distribution, InteractionPotential, Model};
use mpal::{EmsaConstants, MsaParameters};

fn nn() -> InteractionPotential {
    InteractionPotential::nearest_neighbour(1.0)
}

#[test]
fn worked_interactivity_examples() {
    match classify_cube(&[1, 5].into(), 1.0, &nn()) {
        InteractivityVerdict::PartiallyInteractive { n1, n2, s1, s2 } => {
            assert_eq!((n1, n2), (1, 1));
            assert_eq!(s1.into_iter().collect::<Vec<_>>(), vec![0, 1, 2]);
            assert_eq!(s2.into_iter().collect::<Vec<_>>(), vec![4, 5, 6]);
        }
        v => panic!("{v:?}"),
    }
    assert_eq!(classify_cube(&[1, 3].into(), 1.0, &nn()), InteractivityVerdict::FullyInteractive);
}

#[test]
fn worked_separability_example() {
    let a = Cube::new([4, 1].into(), 1.0).unwrap().set();
    let b = Cube::new([4, 4].into(), 1.0).unwrap().set();
    let w = weak_separability(&a, &b).unwrap().unwrap();
    assert_eq!(w.sites.into_iter().collect::<Vec<_>>(), vec![3, 4, 5]);
    assert_eq!((w.n1, w.n2), (1, 2));
}

#[test]
fn far_fully_interactive_cubes_have_disjoint_projections() {
    for l in [1.0, 2.0] {
        let a = Cube::new([0, 1].into(), l).unwrap();
        let b = Cube::new([40, 41].into(), l).unwrap();
        let v = disjoint_projection_check(&a, &b, &nn()).unwrap();
        assert!(v.disjoint);
        assert_eq!(v.hypothesis_met, l > 2.0);
    }
}

#[test]
fn tensor_sector_of_a_split_pair() {
    let model = Model::new(4.0, nn(), Distribution::default());
    let center: Configuration = [-3, 4].into();
    let set = Cube::new(center.clone(), 1.0).unwrap().set();
    let r = model.realize(21, [&set]).unwrap();
    let t = tensor_check(&center, 1.0, &model, &r).unwrap();
    assert!(t.max_deviation.0 < 1e-8);
}

#[test]
fn initial_scale_at_huge_disorder() {
    let theta = Cube::new([0, 0].into(), 1.0).unwrap().set();
    let model = Model::new(1e7, nn(), Distribution::default());
    let mut separated = 0;
    for seed in 0..20 {
        let r = model.realize(seed, [&theta]).unwrap();
        let rep = initial_scale(&theta, &r, &model, 20.0).unwrap();
        if rep.separated {
            separated += 1;
            assert_eq!(rep.decay_holds, Some(true));
        }
    }
    assert!(separated > 0);
}

#[test]
fn schedules() {
    let params = MsaParameters::default();
    let constants = EmsaConstants::default();
    let threshold = mass_threshold(&params, 2, &constants).unwrap();
    let s = scale_schedule(threshold, &params, 2, 5, &constants).unwrap();
    assert!(s.above_mass);
    assert!(s.rows.iter().all(|r| r.mass.0 >= params.m));
    let d = decay_parameter_schedule(1.0, 2, 1.5).unwrap();
    assert!((d.values[0].0 - 55.0).abs() < 1e-9 && (d.values[1].0 - 30.0).abs() < 1e-9);
}

fn setup(n: usize, constants: EmsaConstants, params: MsaParameters, ell: f64) -> EmsaSetup {
    EmsaSetup {
        center: Configuration::new(vec![0; n]).unwrap(),
        ell,
        model: Model::new(1000.0, nn(), Distribution::default()),
        params,
        mass: params.m,
        constants,
        trace_cap: 4,
    }
}

#[test]
fn default_constants_leave_buffered_and_iteration_vacuous() {
    let s = setup(1, EmsaConstants::default(), MsaParameters::default(), 4.0);
    let r = run_emsa_seed(&s, 0).unwrap();
    assert!(r.local_decay.applicable > 0);
    assert_eq!(r.buffered_decay.applicable, 0);
    assert_eq!(r.iteration.traces, 0);
    assert_eq!(r.events.resonance_pairs, 0);
    assert_eq!(r.violations(), 0);
}

#[test]
fn shrunk_constants_exercise_the_buffer() {
    let constants = EmsaConstants {
        fi_distance: 1.0,
        nr_distance: 0.5,
        buffer_radius: 1.0,
        shelter_lo: 1.0,
        shelter_hi: 1.5,
        fattening: 0.5,
        mass_loss: 250.0,
        ell_min: 2.0,
    };
    let params = MsaParameters::new(0.3, 0.9, 1.9, 0.5).unwrap();
    let s = setup(1, constants, params, 6.0);
    let mut buffered = 0;
    for seed in 0..6 {
        let r = run_emsa_seed(&s, seed).unwrap();
        assert!(r.buffer.as_ref().unwrap().proper);
        buffered += r.buffered_decay.applicable;
        assert_eq!(r.violations(), 0, "seed {seed}");
        let text = r.to_json().unwrap();
        assert_eq!(EmsaReport::from_json(&text).unwrap().to_json().unwrap(), text);
    }
    assert!(buffered > 0);
}

#[test]
fn unknown_report_schema_is_rejected() {
    let s = setup(1, EmsaConstants::default(), MsaParameters::default(), 4.0);
    let text = run_emsa_seed(&s, 0).unwrap().to_json().unwrap();
    let altered = text.replace("mpal.emsa.v1", "mpal.emsa.v0");
    assert!(EmsaReport::from_json(&altered).is_err());
}
