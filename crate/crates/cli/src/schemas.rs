//! JSON schemas for every document the CLI writes.

use clap::ValueEnum;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Name {
    Family,
    FamilyGolden,
    Files,
    Dual,
    System,
    Level,
    Expand,
    Check,
    Factor,
    Certificate,
}

pub fn text(name: Name) -> &'static str {
    match name {
        Name::Family => include_str!("../schemas/family.json"),
        Name::FamilyGolden => include_str!("../schemas/family-golden.json"),
        Name::Files => include_str!("../schemas/files.json"),
        Name::Dual => include_str!("../schemas/dual.json"),
        Name::System => include_str!("../schemas/system.json"),
        Name::Level => include_str!("../schemas/level.json"),
        Name::Expand => include_str!("../schemas/expand.json"),
        Name::Check => include_str!("../schemas/check.json"),
        Name::Factor => include_str!("../schemas/factor.json"),
        Name::Certificate => include_str!("../schemas/certificate.json"),
    }
}
