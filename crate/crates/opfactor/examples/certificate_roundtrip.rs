//! Certificates as files: write one, read it back bit-for-bit, re-verify
//! it from nothing but the file, and watch verification catch a tampered
//! copy.
//!
//! Run with `cargo run --example certificate_roundtrip`.

use opfactor::certificate::{verify_certificate_file, CertificateFile};
use opfactor::douglas::douglas_factor;
use opfactor::instances::{gen_instance, InstanceKind, InstanceSpec};
use opfactor::tolerance::Tolerance;

fn main() -> opfactor::Result<()> {
    let tol = Tolerance::default();
    let spec = InstanceSpec::new(InstanceKind::DouglasFeasible, 5, 99, 1.0)?;
    let inst = gen_instance(&spec)?;

    let cert = douglas_factor(&inst.t, &inst.b, &tol)?;
    let file = CertificateFile::from_douglas(&inst.t, &inst.b, &tol, &cert);

    // Serialize → parse → serialize again: floats survive exactly, so the
    // two JSON texts are identical bytes.
    let json = file.to_json()?;
    let reparsed = CertificateFile::from_json(&json)?;
    let json2 = reparsed.to_json()?;
    println!("serialized certificate: {} bytes", json.len());
    println!("bit-exact roundtrip   : {}", json == json2);
    assert_eq!(json, json2);

    // A verifier that never saw the solver re-derives every claim from the
    // file alone.
    let report = verify_certificate_file(&reparsed)?;
    println!("\nre-verification of the loaded file:\n{report}");
    assert!(report.all_passed());

    // On disk and back.
    let dir = std::env::temp_dir();
    let path = dir.join("opfactor_roundtrip_cert.json");
    file.save(&path)?;
    let loaded = CertificateFile::load(&path)?;
    assert!(verify_certificate_file(&loaded)?.all_passed());
    println!("disk roundtrip verified ({})", path.display());

    // Tampering is caught: nudge one matrix entry by 1e-2 and the residual
    // checks fail loudly.
    let mut v: serde_json::Value = serde_json::from_str(&json).expect("valid json");
    let entry = &mut v["t_matrix"]["data"][0][0];
    *entry = serde_json::json!(entry.as_f64().unwrap() + 1e-2);
    let tampered = CertificateFile::from_json(&v.to_string())?;
    let report = verify_certificate_file(&tampered)?;
    println!("\ntampered copy:");
    for failed in report.failed() {
        println!(
            "  FAILED {} (measured {:.3e}, bound {:.3e})",
            failed.name, failed.measured, failed.bound
        );
    }
    assert!(!report.all_passed());

    std::fs::remove_file(&path).ok();
    Ok(())
}
