//! Raw-text ingestion: one `<code>.txt` per language, or a Tatoeba-style TSV.

use std::path::Path;

use ndsl_core::corpus::{parse_labeled_raw, pool_from_raw_text, Abbreviations, Pools, TsvImport};
use ndsl_core::Label;

use crate::formats::read_text;
use crate::{Error, Result};

/// Reads `<dir>/<code>.txt` for all six labels and runs each through
/// sentence extraction and cleaning.
pub fn ingest_raw_dir(dir: &Path, abbreviations: &Abbreviations) -> Result<Pools> {
    let mut pools = Pools::new();
    for label in Label::ALL {
        let file = dir.join(format!("{}.txt", label.code()));
        if !file.is_file() {
            return Err(Error::MissingLabelFile { dir: dir.to_path_buf(), code: label.code().to_string() });
        }
        let raw = read_text(&file)?;
        pools.insert(label, pool_from_raw_text(label, &raw, abbreviations));
    }
    Ok(pools)
}

/// Reads `<code>\t<raw sentence>` rows. Unknown codes are skipped and counted.
pub fn ingest_tatoeba(path: &Path) -> Result<TsvImport> {
    parse_labeled_raw(&read_text(path)?).map_err(|source| Error::Parse { path: path.to_path_buf(), source })
}

/// Reads an abbreviation list (one per line, `#` comments) on top of the
/// built-in guard list.
pub fn load_abbreviations(path: Option<&Path>) -> Result<Abbreviations> {
    let mut abbr = Abbreviations::default();
    if let Some(p) = path {
        abbr.extend_from_text(&read_text(p)?);
    }
    Ok(abbr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_all(dir: &Path, skip: Option<Label>) {
        for l in Label::ALL {
            if Some(l) != skip {
                std::fs::write(dir.join(format!("{}.txt", l.code())), format!("Sætning {}. Endnu en!\n", l.code())).unwrap();
            }
        }
    }

    #[test]
    fn reads_six_files() {
        let dir = tempfile::tempdir().unwrap();
        write_all(dir.path(), None);
        let pools = ingest_raw_dir(dir.path(), &Abbreviations::default()).unwrap();
        assert_eq!(pools.len(), 6);
        assert_eq!(pools[&Label::Fo].len(), 2);
        assert_eq!(pools[&Label::Fo][0].text(), "sætning fo ");
    }

    #[test]
    fn missing_file_names_the_code() {
        let dir = tempfile::tempdir().unwrap();
        write_all(dir.path(), Some(Label::Nn));
        match ingest_raw_dir(dir.path(), &Abbreviations::default()) {
            Err(Error::MissingLabelFile { code, .. }) => assert_eq!(code, "nn"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn invalid_utf8_reports_the_byte_offset() {
        let dir = tempfile::tempdir().unwrap();
        write_all(dir.path(), None);
        std::fs::write(dir.path().join("sv.txt"), b"hej d\xe5").unwrap();
        match ingest_raw_dir(dir.path(), &Abbreviations::default()) {
            Err(Error::InvalidUtf8 { file, offset }) => {
                assert!(file.ends_with("sv.txt"));
                assert_eq!(offset, 5);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tatoeba_skips_unknown_codes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.tsv");
        std::fs::write(&p, "dk\tHej!\nde\tHallo!\nis\tHæ.\n").unwrap();
        let import = ingest_tatoeba(&p).unwrap();
        assert_eq!(import.unknown_label_rows, 1);
        assert_eq!(import.pools[&Label::Is][0].text(), "hæ ");
        std::fs::write(&p, "dk\ta\tb\n").unwrap();
        assert!(matches!(ingest_tatoeba(&p), Err(Error::Parse { source: ndsl_core::Error::MalformedRow(1), .. })));
    }
}
