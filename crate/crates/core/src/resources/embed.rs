use std::collections::HashMap;
use std::path::Path;

use crate::scalar::{dot, Scalar};

use super::{read_file, LoadStats, ResourceError};

/// Dense vectors keyed by token; phrases use `_` as separator.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable<T> {
    dim: usize,
    keys: Vec<String>,
    vectors: Vec<Vec<T>>,
    norms: Vec<T>,
    index: HashMap<String, usize>,
}

impl<T: Scalar> EmbeddingTable<T> {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable { dim, keys: Vec::new(), vectors: Vec::new(), norms: Vec::new(), index: HashMap::new() }
    }

    /// Adds a vector; duplicates keep the first occurrence. Returns whether it was inserted.
    pub fn insert(&mut self, key: &str, vector: Vec<T>) -> bool {
        assert_eq!(vector.len(), self.dim, "vector length must equal table dimension");
        assert!(vector.iter().all(|x| x.is_finite()), "non-finite embedding component");
        if self.index.contains_key(key) {
            return false;
        }
        self.index.insert(key.to_owned(), self.keys.len());
        self.norms.push(dot(&vector, &vector).sqrt());
        self.keys.push(key.to_owned());
        self.vectors.push(vector);
        true
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&[T]> {
        self.index.get(key).map(|&i| self.vectors[i].as_slice())
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.keys.iter().map(String::as_str)
    }

    fn cosine_at(&self, query: &[T], query_norm: T, i: usize) -> T {
        let denom = query_norm * self.norms[i];
        if denom == T::zero() {
            T::zero()
        } else {
            (dot(query, &self.vectors[i]) / denom).max(-T::one()).min(T::one())
        }
    }
}

/// Parses word2vec text format: a `count dim` header, then `token v1 .. v_dim` rows.
pub fn load_embeddings<T: Scalar>(path: impl AsRef<Path>) -> Result<(EmbeddingTable<T>, LoadStats), ResourceError> {
    let path = path.as_ref();
    let content = read_file(path)?;
    let malformed = |line: usize, reason: String| ResourceError::Malformed { path: path.to_owned(), line, reason };
    let mut lines = content.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| malformed(1, "missing `count dim` header".into()))?;
    let header: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| malformed(1, format!("bad header: {e}")))?;
    let [count, dim] = header[..] else {
        return Err(malformed(1, "header must be `count dim`".into()));
    };
    if dim == 0 {
        return Err(malformed(1, "dimension must be positive".into()));
    }
    let mut table = EmbeddingTable::new(dim);
    let mut stats = LoadStats::default();
    for (i, line) in lines {
        let lineno = i + 1;
        stats.lines += 1;
        let mut parts = line.split_whitespace();
        let key = parts.next().expect("non-empty line has a first field");
        let values: Vec<T> = parts
            .map(|v| v.parse::<f64>().map(T::of))
            .collect::<Result<_, _>>()
            .map_err(|e| malformed(lineno, format!("bad component: {e}")))?;
        if values.len() != dim {
            return Err(ResourceError::DimensionMismatch { path: path.to_owned(), line: lineno, expected: dim, found: values.len() });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(malformed(lineno, "non-finite component".into()));
        }
        if !table.insert(key, values) {
            stats.skipped += 1;
        }
    }
    if stats.lines != count {
        return Err(malformed(1, format!("header declares {count} rows, body has {}", stats.lines)));
    }
    stats.rules = table.len();
    Ok((table, stats))
}

/// The `k` most cosine-similar entries to `query`, excluding the query itself.
///
/// Sorted by cosine descending, ties broken by key. Out-of-vocabulary
/// queries yield an empty list.
pub fn embed_neighbors<T: Scalar>(table: &EmbeddingTable<T>, query: &str, k: usize) -> Vec<(String, T)> {
    let Some(&qi) = table.index.get(query) else {
        return Vec::new();
    };
    let q = &table.vectors[qi];
    let qn = table.norms[qi];
    let mut scored: Vec<(usize, T)> = (0..table.len())
        .filter(|&i| i != qi)
        .map(|i| (i, table.cosine_at(q, qn, i)))
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("cosines are finite")
            .then_with(|| table.keys[a.0].cmp(&table.keys[b.0]))
    });
    scored.truncate(k);
    scored.into_iter().map(|(i, c)| (table.keys[i].clone(), c)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(rows: &[(&str, &[f64])]) -> EmbeddingTable<f64> {
        let mut t = EmbeddingTable::new(rows[0].1.len());
        for (k, v) in rows {
            t.insert(k, v.to_vec());
        }
        t
    }

    #[test]
    fn identical_vector_ranks_first() {
        let t = table(&[("a", &[1.0, 2.0]), ("b", &[0.0, 1.0]), ("c", &[1.0, 2.0])]);
        let n = embed_neighbors(&t, "a", 2);
        assert_eq!(n[0].0, "c");
        assert!((n[0].1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_pair() {
        let t = table(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        assert_eq!(embed_neighbors(&t, "a", 1), vec![("b".to_string(), 0.0)]);
    }

    #[test]
    fn oov_and_small_vocab() {
        let t = table(&[("a", &[1.0, 0.0]), ("b", &[0.0, 1.0])]);
        assert!(embed_neighbors(&t, "zzz", 3).is_empty());
        assert_eq!(embed_neighbors(&t, "a", 10).len(), 1);
    }

    #[test]
    fn ties_break_lexicographically() {
        let t = table(&[("q", &[1.0, 0.0]), ("zeta", &[2.0, 0.0]), ("alpha", &[3.0, 0.0])]);
        let keys: Vec<String> = embed_neighbors(&t, "q", 2).into_iter().map(|p| p.0).collect();
        assert_eq!(keys, ["alpha", "zeta"]);
    }

    #[test]
    fn five_entries_match_exhaustive_cosines() {
        // cosines to q=(1,0): a=(1,1) .7071, b=(1,0) 1, c=(0,1) 0, d=(-1,1) -.7071, e=(2,1) .8944
        let t = table(&[
            ("q", &[1.0, 0.0]),
            ("a", &[1.0, 1.0]),
            ("b", &[1.0, 0.0]),
            ("c", &[0.0, 1.0]),
            ("d", &[-1.0, 1.0]),
            ("e", &[2.0, 1.0]),
        ]);
        let n = embed_neighbors(&t, "q", 3);
        let keys: Vec<&str> = n.iter().map(|p| p.0.as_str()).collect();
        assert_eq!(keys, ["b", "e", "a"]);
        assert!((n[1].1 - 2.0 / 5f64.sqrt()).abs() < 1e-12);
    }

    fn load(content: &str) -> Result<(EmbeddingTable<f64>, LoadStats), ResourceError> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        std::fs::write(&path, content).unwrap();
        load_embeddings(&path)
    }

    #[test]
    fn parse_text_format() {
        let (t, _) = load("3 4\na 1 0 0 0\nb 0 1 0 0\nnew_york 0 0 1 0.5\n").unwrap();
        assert_eq!((t.len(), t.dim()), (3, 4));
        assert_eq!(t.get("new_york"), Some(&[0.0, 0.0, 1.0, 0.5][..]));
    }

    #[test]
    fn short_row_is_dimension_mismatch() {
        assert!(matches!(
            load("1 4\na 1 0 0\n"),
            Err(ResourceError::DimensionMismatch { line: 2, expected: 4, found: 3, .. })
        ));
    }

    #[test]
    fn duplicates_keep_first() {
        let (t, stats) = load("2 2\na 1 0\na 0 1\n").unwrap();
        assert_eq!(t.get("a"), Some(&[1.0, 0.0][..]));
        assert_eq!(stats.skipped, 1);
    }

    #[test]
    fn works_in_single_precision() {
        let (t, _) = load_f32("2 2\na 1 0\nb 1 1\n");
        let n = embed_neighbors(&t, "a", 1);
        assert!((n[0].1 - std::f32::consts::FRAC_1_SQRT_2).abs() < 1e-6);
    }

    fn load_f32(content: &str) -> (EmbeddingTable<f32>, LoadStats) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        std::fs::write(&path, content).unwrap();
        load_embeddings(&path).unwrap()
    }
}
