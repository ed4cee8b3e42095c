//! Writing a system and certificate to JSON, reading them back, and checking.
//!
//! `cargo run --example files`

use conecert::io::{certificate_to_json, parse_certificate, parse_system, system_to_json, Certificate};
use conecert::l1cert::{certify_l1, check_l1_certificate, L1Options, L1Outcome};
use conecert::models::{build_virus_example, VirusParams};

fn main() -> conecert::Result<()> {
    let system = build_virus_example(VirusParams { k_c_quarantine: 0.8, ..VirusParams::default() })?;
    let text = system_to_json(&system);
    println!("{text}");
    let reread = parse_system(&text)?;
    assert_eq!(reread, system, "round trip is exact");

    let L1Outcome::Certified(cert) = certify_l1(&reread, L1Options::default())? else {
        unreachable!("certifiable scenario");
    };
    let cert_text = certificate_to_json(&reread, &Certificate::L1(cert));
    println!("{cert_text}");
    let Certificate::L1(back) = parse_certificate(&reread, &cert_text)? else { unreachable!() };
    let report = check_l1_certificate(&reread, &back, back.margin / 2.0)?;
    print!("{report}");
    Ok(())
}
