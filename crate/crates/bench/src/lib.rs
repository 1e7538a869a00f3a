//! Shared fixtures for the benchmark targets.

use spinor_core::ingest::{gen_tempered, gen_trivial};
use spinor_core::{CoeffTable, EigenformData};

pub fn tempered_form(n: u64) -> EigenformData {
    gen_tempered(1, n).unwrap()
}

pub fn trivial_form(n: u64) -> EigenformData {
    gen_trivial(n).unwrap()
}

pub fn tempered_table(n: u64) -> CoeffTable {
    CoeffTable::build(&tempered_form(n), n).unwrap()
}
