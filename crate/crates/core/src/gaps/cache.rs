//! On-disk store for coefficient listings, one listing line per gap length.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::gaps::coefficients::GapCoefficientListing;

pub const CACHE_FILE: &str = "listings.txt";

#[derive(Debug, Clone)]
pub struct CoefficientCache {
    dir: PathBuf,
    listings: BTreeMap<u64, GapCoefficientListing>,
}

impl CoefficientCache {
    /// Loads the cache under `dir`; a missing directory is an empty cache.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        let path = dir.join(CACHE_FILE);
        let mut listings = BTreeMap::new();
        if path.exists() {
            for line in fs::read_to_string(&path)?.lines() {
                if line.trim().is_empty() || line.trim_start().starts_with('#') {
                    continue;
                }
                let listing: GapCoefficientListing = line.parse()?;
                listings.insert(listing.gap(), listing);
            }
        }
        Ok(Self { dir, listings })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self) -> PathBuf {
        self.dir.join(CACHE_FILE)
    }

    pub fn get(&self, gap: u64) -> Option<&GapCoefficientListing> {
        self.listings.get(&gap)
    }

    pub fn listings(&self) -> impl Iterator<Item = &GapCoefficientListing> {
        self.listings.values()
    }

    /// Inserts `listing` and rewrites the file.
    pub fn store(&mut self, listing: GapCoefficientListing) -> Result<()> {
        self.listings.insert(listing.gap(), listing);
        self.flush()
    }

    fn flush(&self) -> Result<()> {
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!("{CACHE_FILE}.tmp"));
        {
            let mut out = fs::File::create(&tmp)?;
            for listing in self.listings.values() {
                writeln!(out, "{listing}")?;
            }
            out.sync_all()?;
        }
        fs::rename(&tmp, self.path()).map_err(Error::from)
    }
}
