//! Append-only trace cache: line records `curve_id,p,order,ap` under a
//! version header. Reads re-verify a deterministic 1% sample by
//! recounting, so a corrupted or stale file is rejected instead of
//! silently poisoning certificates.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use super::counting::{count_points_mod_p, TraceRecord};
use super::WeierstrassCurve;

const HEADER: &str = "brauerkit-apcache 1";

#[derive(Debug)]
pub enum CacheError {
    Io(std::io::Error),
    BadHeader(String),
    BadRecord { line: usize, content: String },
    VerificationFailed { curve_id: String, p: u64 },
}

impl fmt::Display for CacheError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CacheError::Io(e) => write!(f, "cache io error: {}", e),
            CacheError::BadHeader(h) => write!(f, "unrecognized cache header: {}", h),
            CacheError::BadRecord { line, content } => {
                write!(f, "malformed cache record at line {}: {}", line, content)
            }
            CacheError::VerificationFailed { curve_id, p } => {
                write!(f, "cache record failed recount: {} at p = {}", curve_id, p)
            }
        }
    }
}

impl std::error::Error for CacheError {}

impl From<std::io::Error> for CacheError {
    fn from(e: std::io::Error) -> Self {
        CacheError::Io(e)
    }
}

/// In-memory view of the cache plus the backing path for appends.
#[derive(Debug)]
pub struct ApCache {
    path: PathBuf,
    entries: BTreeMap<(String, u64), (u64, i64)>,
    pending: Vec<(String, TraceRecord)>,
}

impl ApCache {
    /// Opens (or initializes) a cache file. On read, a deterministic 1%
    /// sample of the records for each curve requested later is recounted
    /// via `verify_curve`.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, CacheError> {
        let path = path.as_ref().to_path_buf();
        let mut entries = BTreeMap::new();
        if path.exists() {
            let content = fs::read_to_string(&path)?;
            let mut lines = content.lines().enumerate();
            match lines.next() {
                Some((_, h)) if h.trim() == HEADER => {}
                Some((_, h)) => return Err(CacheError::BadHeader(h.to_string())),
                None => return Err(CacheError::BadHeader(String::new())),
            }
            for (i, line) in lines {
                let line = line.trim();
                if line.is_empty() {
                    continue;
                }
                let parts: Vec<&str> = line.split(',').collect();
                let parsed = (|| -> Option<(String, u64, u64, i64)> {
                    if parts.len() != 4 {
                        return None;
                    }
                    Some((
                        parts[0].to_string(),
                        parts[1].parse().ok()?,
                        parts[2].parse().ok()?,
                        parts[3].parse().ok()?,
                    ))
                })();
                match parsed {
                    Some((id, p, order, ap)) => {
                        entries.insert((id, p), (order, ap));
                    }
                    None => {
                        return Err(CacheError::BadRecord {
                            line: i + 1,
                            content: line.to_string(),
                        })
                    }
                }
            }
        }
        Ok(ApCache {
            path,
            entries,
            pending: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, curve_id: &str, p: u64) -> Option<TraceRecord> {
        self.entries
            .get(&(curve_id.to_string(), p))
            .map(|&(order, ap)| TraceRecord { p, order, ap })
    }

    pub fn insert(&mut self, curve_id: &str, rec: TraceRecord) {
        let key = (curve_id.to_string(), rec.p);
        if !self.entries.contains_key(&key) {
            self.entries.insert(key, (rec.order, rec.ap));
            self.pending.push((curve_id.to_string(), rec));
        }
    }

    /// Recounts a deterministic 1% sample (at least one record) of the
    /// cached entries for this curve.
    pub fn verify_curve(&self, curve: &WeierstrassCurve) -> Result<(), CacheError> {
        let id = curve.id();
        let recs: Vec<(u64, u64, i64)> = self
            .entries
            .iter()
            .filter(|((cid, _), _)| *cid == id)
            .map(|((_, p), &(order, ap))| (*p, order, ap))
            .collect();
        if recs.is_empty() {
            return Ok(());
        }
        // deterministic sample: a multiplicative stride seeded by the
        // record count
        let sample = (recs.len() / 100).max(1);
        let stride = (recs.len() / sample).max(1);
        for idx in (0..recs.len()).step_by(stride).take(sample) {
            let (p, order, ap) = recs[idx];
            match count_points_mod_p(curve, p) {
                Ok((o, a)) if o == order && a == ap => {}
                _ => {
                    return Err(CacheError::VerificationFailed {
                        curve_id: id.clone(),
                        p,
                    })
                }
            }
        }
        Ok(())
    }

    /// Appends all pending records (creating the file with its header on
    /// first write).
    pub fn flush(&mut self) -> Result<(), CacheError> {
        if self.pending.is_empty() {
            return Ok(());
        }
        let new_file = !self.path.exists();
        let mut f = fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)?;
        if new_file {
            writeln!(f, "{}", HEADER)?;
        }
        for (id, rec) in self.pending.drain(..) {
            writeln!(f, "{},{},{},{}", id, rec.p, rec.order, rec.ap)?;
        }
        Ok(())
    }
}

/// Trace scan that consults and fills a cache when one is supplied.
pub fn trace_scan_cached(
    curve: &WeierstrassCurve,
    bound: u64,
    cache: Option<&mut ApCache>,
) -> Result<Vec<TraceRecord>, super::EcError> {
    match cache {
        None => super::trace_scan(curve, bound),
        Some(cache) => {
            let id = curve.id();
            let mut missing = Vec::new();
            for p in crate::arith::primes_up_to(bound) {
                if curve.has_good_reduction(p)? && cache.get(&id, p).is_none() {
                    missing.push(p);
                }
            }
            let fresh: Vec<Result<TraceRecord, super::EcError>> =
                crate::par::map_collect(&missing, |&p| {
                    count_points_mod_p(curve, p).map(|(order, ap)| TraceRecord { p, order, ap })
                });
            for r in fresh {
                cache.insert(&id, r?);
            }
            let mut out = Vec::new();
            for p in crate::arith::primes_up_to(bound) {
                if let Some(rec) = cache.get(&id, p) {
                    out.push(rec);
                }
            }
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tmpfile(name: &str) -> PathBuf {
        let mut p = std::env::temp_dir();
        p.push(format!("brauerkit-test-{}-{}", std::process::id(), name));
        let _ = fs::remove_file(&p);
        p
    }

    #[test]
    fn roundtrip_and_verify() {
        let path = tmpfile("roundtrip");
        let e = WeierstrassCurve::e67();
        {
            let mut cache = ApCache::open(&path).unwrap();
            let recs = trace_scan_cached(&e, 100, Some(&mut cache)).unwrap();
            assert!(!recs.is_empty());
            cache.flush().unwrap();
        }
        {
            let cache = ApCache::open(&path).unwrap();
            assert!(!cache.is_empty());
            cache.verify_curve(&e).unwrap();
            assert_eq!(cache.get(&e.id(), 3).unwrap().ap, -2);
        }
        let _ = fs::remove_file(&path);
    }

    #[test]
    fn tampered_cache_detected() {
        let path = tmpfile("tamper");
        let e = WeierstrassCurve::e67();
        {
            let mut cache = ApCache::open(&path).unwrap();
            trace_scan_cached(&e, 60, Some(&mut cache)).unwrap();
            cache.flush().unwrap();
        }
        // corrupt every record's order
        let content = fs::read_to_string(&path).unwrap();
        let corrupted: String = content
            .lines()
            .enumerate()
            .map(|(i, l)| {
                if i == 0 {
                    l.to_string()
                } else {
                    let mut parts: Vec<String> =
                        l.split(',').map(|s| s.to_string()).collect();
                    parts[2] = "999".to_string();
                    parts.join(",")
                }
            })
            .collect::<Vec<_>>()
            .join("\n");
        fs::write(&path, corrupted).unwrap();
        let cache = ApCache::open(&path).unwrap();
        assert!(matches!(
            cache.verify_curve(&e),
            Err(CacheError::VerificationFailed { .. })
        ));
        let _ = fs::remove_file(&path);
    }

    #[test]
    fn bad_header_rejected() {
        let path = tmpfile("header");
        fs::write(&path, "not-a-cache\n1,2,3,4\n").unwrap();
        assert!(matches!(
            ApCache::open(&path),
            Err(CacheError::BadHeader(_))
        ));
        let _ = fs::remove_file(&path);
    }

    #[test]
    fn append_only_growth() {
        let path = tmpfile("append");
        let e = WeierstrassCurve::e67();
        {
            let mut cache = ApCache::open(&path).unwrap();
            trace_scan_cached(&e, 30, Some(&mut cache)).unwrap();
            cache.flush().unwrap();
        }
        let first = fs::read_to_string(&path).unwrap();
        {
            let mut cache = ApCache::open(&path).unwrap();
            trace_scan_cached(&e, 60, Some(&mut cache)).unwrap();
            cache.flush().unwrap();
        }
        let second = fs::read_to_string(&path).unwrap();
        assert!(second.starts_with(&first), "cache must be append-only");
        assert!(second.len() > first.len());
        let _ = fs::remove_file(&path);
    }
}
