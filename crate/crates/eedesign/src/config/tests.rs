use super::*;
use crate::mc::{Csi, Scheme};

fn parse(text: &str) -> Result<ScenarioConfig> {
    parse_config_str(text, "test.ini", Path::new("."))
}

#[test]
fn empty_file_is_reference_scenario() {
    let cfg = parse("").unwrap();
    assert_eq!(cfg.hardware, HardwareProfile::default());
    assert_eq!(cfg.propagation, PropagationModel::default());
    assert_eq!(cfg.coefficients, HardwareProfile::default().coefficients().unwrap());
    assert_eq!(cfg.coherence_block(), 5760);
    let space = cfg.search_space();
    assert_eq!(space.antennas, 1..=1000);
    assert_eq!(space.users, 1..=500);
    assert_eq!(cfg.search.init, (3, 1, 1.0));
    assert_eq!(cfg.mc.schemes.len(), 3);
    assert!(cfg.mc.config.resample_users);
}

#[test]
fn physical_units_are_converted() {
    let cfg = parse(
        "[hardware]\nbandwidth_mhz = 9\ncoherence_bandwidth_khz = 180\ncoherence_time_ms = 32\n\
         [propagation]\nattenuation_db = -35.3\nd_min_m = 35\n[mc]\npilot_power_w = 2\n",
    )
    .unwrap();
    assert!((cfg.hardware.symbol_time_s - 1.0 / 9e6).abs() < 1e-22);
    let UserDistribution::Annulus(cell) = &cfg.propagation.users else { panic!() };
    assert!((cell.attenuation / 10f64.powf(-3.53) - 1.0).abs() < 1e-12);
    match cfg.mc.schemes[0].pilot_energy {
        PilotEnergy::PerSymbol(e) => assert!((e - 2.0 / 9e6).abs() < 1e-20),
        other => panic!("{other:?}"),
    }
}

#[test]
fn eta_out_of_range() {
    let err = parse("[hardware]\neta = 1.5\n").unwrap_err();
    assert!(err.to_string().contains("eta must be in (0,1]"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn inverted_annulus() {
    let err = parse("[propagation]\nd_min_m = 300\nd_max_m = 250\n").unwrap_err();
    assert!(matches!(err, SimError::Validation { .. }), "{err}");
}

#[test]
fn unknown_key_reports_line() {
    let err = parse("# comment\n[hardware]\neta = 0.3\nwatts = 5\n").unwrap_err();
    match err {
        SimError::Parse { line, message, .. } => {
            assert_eq!(line, 4);
            assert!(message.contains("watts"));
        }
        other => panic!("{other}"),
    }
}

#[test]
fn syntax_errors_report_lines() {
    let cases = [
        ("[hardware\n", 1),
        ("[radio]\n", 1),
        ("eta = 0.3\n", 1),
        ("[hardware]\n\neta 0.3\n", 3),
        ("[hardware]\n= 3\n", 2),
        ("[hardware]\neta = 0.3\neta = 0.4\n", 3),
        ("[hardware]\neta = high\n", 2),
        ("[mc]\nresample_users = maybe\n", 2),
        ("[mc]\nschemes = zf, mmse\n", 2),
        ("[search]\nm_max = -4\n", 2),
    ];
    for (text, expected) in cases {
        match parse(text) {
            Err(SimError::Parse { line, .. }) => assert_eq!(line, expected, "{text:?}"),
            other => panic!("{text:?}: {other:?}"),
        }
    }
}

#[test]
fn search_and_mc_overrides() {
    let cfg = parse(
        "[search]\nm_max = 250\nk_max = 150\nrho_cap = 3\nantennas = 10, 20,40\ninit_m = 5\ninit_k = 2\n\
         [mc]\ntrials = 77\nseed = 12345678901\nresample_users = no\nschemes = mrt, zf-est\nrzf_regularization = 1e-12\n\
         [system]\ncoherence_block = 400\nnoise_variance = 2e-20\n",
    )
    .unwrap();
    let space = cfg.search_space();
    assert_eq!(space.antennas, 1..=250);
    assert_eq!(space.users, 1..=150);
    assert_eq!(space.rho_cap, Some(3.0));
    assert_eq!(cfg.search.antennas, vec![10, 20, 40]);
    assert_eq!(cfg.mc.config, McConfig { trials: 77, seed: 12_345_678_901, resample_users: false });
    assert_eq!(cfg.mc.schemes[0].scheme, Scheme::Mrt);
    assert_eq!(cfg.mc.schemes[1].csi, Csi::Estimated);
    assert_eq!(cfg.mc.schemes[1].regularization, Some(1e-12));
    assert_eq!(cfg.propagation.noise_variance, 2e-20);
}

#[test]
fn invalid_search_settings() {
    for text in [
        "[search]\nk_min = 0\n",
        "[search]\nm_min = 20\nm_max = 10\n",
        "[search]\ninit_m = 2\ninit_k = 2\n",
        "[search]\ninit_rho = 0\n",
        "[search]\nantennas = 1, 5\n",
        "[system]\ncoherence_block = 1\n",
        "[mc]\ntrials = 0\n",
        "[mc]\nschemes = ,\n",
        "[mc]\npilot_power_w = -1\n",
        "[propagation]\nmodel = hata\n",
        "[propagation]\nmodel = empirical\n",
        "[system]\nnoise_variance = 0\n",
    ] {
        let err = parse(text).unwrap_err();
        assert!(matches!(err, SimError::Validation { .. }), "{text:?}: {err}");
        assert_eq!(err.exit_code(), 2);
    }
}

#[test]
fn empirical_pdf_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("pdf.csv"), "x,density\n# uniform on [1e-13, 3e-13]\n1e-13,5e12\n3e-13,5e12\n")
        .unwrap();
    let ini = dir.path().join("scenario.ini");
    std::fs::write(&ini, "[propagation]\nmodel = empirical\npdf_csv = pdf.csv\n").unwrap();
    let cfg = parse_config(&ini).unwrap();
    // E{1/lambda} of the uniform density is ln(3) / 2e-13
    let expected = 1e-20 * 3f64.ln() / 2e-13;
    assert!((cfg.a_lambda / expected - 1.0).abs() < 1e-9);

    std::fs::write(dir.path().join("pdf.csv"), "1e-13,5e12\n3e-13\n").unwrap();
    assert!(matches!(parse_config(&ini), Err(SimError::Parse { .. }) | Err(SimError::Csv(_))));
}

#[test]
fn missing_file() {
    let err = parse_config(Path::new("/nonexistent/scenario.ini")).unwrap_err();
    assert!(matches!(err, SimError::Io { .. }));
    assert_eq!(err.exit_code(), 2);
}
