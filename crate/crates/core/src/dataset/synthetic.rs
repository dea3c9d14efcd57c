//! Synthetic connection records with the KDD column layout.
//!
//! Each class draws from a hand-written traffic profile loosely modeled on
//! the attack families of the real data (smurf/neptune floods, scans,
//! password guessing, root shells). A fraction of records in every class is
//! drawn from the normal profile instead so the classes overlap. Used by the
//! runnable examples and by tests that need end-to-end data without the
//! published files.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{AttackClass, RawRecord, RecordFormat, FEATURE_COUNT};

/// Probability that an attack record borrows the normal traffic profile.
pub const OVERLAP: f64 = 0.05;

/// Generates `counts[c]` records for each class `c`, in shuffled order.
pub fn generate(counts: [usize; 5], seed: u64) -> Vec<RawRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(counts.iter().sum());
    for class in AttackClass::ALL {
        for _ in 0..counts[class.index()] {
            out.push(record(class, &mut rng));
        }
    }
    out.shuffle(&mut rng);
    out
}

/// Renders a record as one line of the given file format.
pub fn to_line(record: &RawRecord, format: RecordFormat) -> String {
    let mut line = record.features.join(",");
    line.push(',');
    line.push_str(&record.label);
    match format {
        RecordFormat::Kdd99 => line.push('.'),
        RecordFormat::NslKdd => {
            if let Some(d) = record.difficulty {
                line.push_str(&format!(",{d}"));
            }
        }
    }
    line
}

pub fn write_records<W: Write>(records: &[RawRecord], format: RecordFormat, mut w: W) -> std::io::Result<()> {
    for r in records {
        writeln!(w, "{}", to_line(r, format))?;
    }
    w.flush()
}

struct Fields([String; FEATURE_COUNT]);

impl Fields {
    fn new() -> Self {
        Fields(std::array::from_fn(|_| "0".to_string()))
    }

    fn int(&mut self, col: usize, v: u64) {
        self.0[col] = v.to_string();
    }

    fn rate(&mut self, col: usize, v: f64) {
        self.0[col] = format!("{:.2}", v.clamp(0.0, 1.0));
    }

    fn sym(&mut self, col: usize, v: &str) {
        self.0[col] = v.to_string();
    }
}

fn pick<'a, R: Rng>(rng: &mut R, options: &[&'a str]) -> &'a str {
    options[rng.gen_range(0..options.len())]
}

fn record<R: Rng>(class: AttackClass, rng: &mut R) -> RawRecord {
    let (label, profile) = match class {
        AttackClass::Normal => ("normal", AttackClass::Normal),
        AttackClass::Dos => (pick(rng, &["smurf", "neptune", "back", "teardrop"]), class),
        AttackClass::Probe => (pick(rng, &["satan", "ipsweep", "portsweep", "nmap"]), class),
        AttackClass::R2l => (pick(rng, &["guess_passwd", "warezclient", "ftp_write"]), class),
        AttackClass::U2r => (pick(rng, &["buffer_overflow", "rootkit", "perl"]), class),
    };
    let profile = if class != AttackClass::Normal && rng.gen_bool(OVERLAP) { AttackClass::Normal } else { profile };

    let mut f = Fields::new();
    // shared host-level rates, overwritten per profile
    f.rate(28, 1.0);
    match (profile, label) {
        (AttackClass::Normal, _) => {
            let svc = pick(rng, &["http", "http", "smtp", "ftp_data", "domain_u", "private", "ftp"]);
            f.sym(1, if svc == "domain_u" { "udp" } else { "tcp" });
            f.sym(2, svc);
            f.sym(3, if rng.gen_bool(0.95) { "SF" } else { pick(rng, &["S1", "RSTR", "REJ"]) });
            f.int(0, if rng.gen_bool(0.9) { 0 } else { rng.gen_range(1..300) });
            f.int(4, rng.gen_range(100..3000));
            f.int(5, rng.gen_range(0..40000));
            f.int(11, u64::from(svc != "domain_u"));
            f.int(9, u64::from(rng.gen_bool(0.02)));
            f.int(22, rng.gen_range(1..30));
            f.int(23, rng.gen_range(1..40));
            f.rate(29, rng.gen_range(0.0..0.1));
            f.rate(30, rng.gen_range(0.0..0.3));
            f.int(31, rng.gen_range(1..256));
            f.int(32, rng.gen_range(1..256));
            f.rate(33, rng.gen_range(0.6..1.0));
            f.rate(34, rng.gen_range(0.0..0.1));
            f.rate(35, rng.gen_range(0.0..0.2));
        }
        (AttackClass::Dos, "smurf") => {
            f.sym(1, "icmp");
            f.sym(2, "ecr_i");
            f.sym(3, "SF");
            f.int(4, *[520, 1032].choose(rng).unwrap());
            f.int(22, rng.gen_range(480..512));
            f.int(23, rng.gen_range(480..512));
            f.int(31, 255);
            f.int(32, 255);
            f.rate(33, 1.0);
            f.rate(35, 1.0);
        }
        (AttackClass::Dos, "neptune") => {
            f.sym(1, "tcp");
            f.sym(2, pick(rng, &["private", "http", "telnet", "ftp_data", "smtp"]));
            f.sym(3, "S0");
            f.int(22, rng.gen_range(100..300));
            f.int(23, rng.gen_range(1..30));
            f.rate(24, 1.0);
            f.rate(25, 1.0);
            f.rate(28, rng.gen_range(0.0..0.15));
            f.rate(29, rng.gen_range(0.05..0.1));
            f.int(31, 255);
            f.int(32, rng.gen_range(1..30));
            f.rate(33, rng.gen_range(0.0..0.1));
            f.rate(37, 1.0);
            f.rate(38, 1.0);
        }
        (AttackClass::Dos, _) => {
            f.sym(1, if label == "teardrop" { "udp" } else { "tcp" });
            f.sym(2, if label == "teardrop" { "private" } else { "http" });
            f.sym(3, "SF");
            f.int(4, if label == "back" { rng.gen_range(54000..55000) } else { 28 });
            f.int(5, if label == "back" { rng.gen_range(7000..9000) } else { 0 });
            f.int(7, if label == "teardrop" { 3 } else { 0 });
            f.int(9, if label == "back" { 2 } else { 0 });
            f.int(11, u64::from(label == "back"));
            f.int(22, rng.gen_range(1..20));
            f.int(23, rng.gen_range(1..20));
            f.int(31, rng.gen_range(50..256));
            f.int(32, rng.gen_range(50..256));
            f.rate(33, 1.0);
        }
        (AttackClass::Probe, _) => {
            let icmp = matches!(label, "ipsweep" | "nmap") && rng.gen_bool(0.7);
            f.sym(1, if icmp { "icmp" } else { "tcp" });
            f.sym(2, if icmp { "eco_i" } else { pick(rng, &["private", "other", "finger", "ftp_data", "telnet"]) });
            f.sym(3, if icmp { "SF" } else { pick(rng, &["REJ", "RSTO", "RSTR", "SH", "S0"]) });
            f.int(4, if icmp { 8 } else { rng.gen_range(0..10) });
            f.int(22, rng.gen_range(1..10));
            f.int(23, rng.gen_range(1..10));
            f.rate(26, rng.gen_range(0.4..1.0));
            f.rate(27, rng.gen_range(0.4..1.0));
            f.rate(28, rng.gen_range(0.0..0.6));
            f.rate(29, rng.gen_range(0.3..1.0));
            f.int(31, rng.gen_range(1..256));
            f.int(32, rng.gen_range(1..20));
            f.rate(34, rng.gen_range(0.3..1.0));
            f.rate(36, rng.gen_range(0.0..0.5));
            f.rate(39, rng.gen_range(0.3..1.0));
            f.rate(40, rng.gen_range(0.3..1.0));
        }
        (AttackClass::R2l, "guess_passwd") => {
            f.sym(1, "tcp");
            f.sym(2, pick(rng, &["telnet", "pop_3", "imap4"]));
            f.sym(3, pick(rng, &["RSTO", "SF"]));
            f.int(0, rng.gen_range(1..5));
            f.int(4, rng.gen_range(100..130));
            f.int(5, rng.gen_range(80..200));
            f.int(9, 0);
            f.int(10, 1);
            f.int(22, rng.gen_range(1..3));
            f.int(23, rng.gen_range(1..3));
            f.rate(26, 1.0);
            f.int(31, rng.gen_range(1..100));
            f.int(32, rng.gen_range(1..100));
            f.rate(39, rng.gen_range(0.5..1.0));
        }
        (AttackClass::R2l, _) => {
            f.sym(1, "tcp");
            f.sym(2, pick(rng, &["ftp_data", "ftp"]));
            f.sym(3, "SF");
            f.int(0, rng.gen_range(0..20000));
            f.int(4, rng.gen_range(100_000..2_000_000));
            f.int(5, rng.gen_range(0..500));
            f.int(9, rng.gen_range(0..30));
            f.int(11, 1);
            f.int(21, u64::from(rng.gen_bool(0.8)));
            f.int(22, rng.gen_range(1..5));
            f.int(23, rng.gen_range(1..5));
            f.int(31, rng.gen_range(1..50));
            f.int(32, rng.gen_range(1..50));
            f.rate(35, rng.gen_range(0.5..1.0));
        }
        (AttackClass::U2r, _) => {
            f.sym(1, "tcp");
            f.sym(2, pick(rng, &["telnet", "ftp_data", "login"]));
            f.sym(3, "SF");
            f.int(0, rng.gen_range(10..500));
            f.int(4, rng.gen_range(1000..6000));
            f.int(5, rng.gen_range(1000..20000));
            f.int(9, rng.gen_range(1..4));
            f.int(11, 1);
            f.int(12, rng.gen_range(0..3));
            f.int(13, 1);
            f.int(15, rng.gen_range(0..5));
            f.int(16, rng.gen_range(0..4));
            f.int(17, rng.gen_range(0..2));
            f.int(22, 1);
            f.int(23, 1);
            f.int(31, rng.gen_range(1..10));
            f.int(32, rng.gen_range(1..10));
        }
    }
    RawRecord { features: f.0.to_vec(), label: label.to_string(), difficulty: Some(rng.gen_range(1..22)) }
}
