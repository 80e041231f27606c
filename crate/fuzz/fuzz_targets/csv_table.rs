#![no_main]

use libfuzzer_sys::fuzz_target;
use pneumodel::csvio::CsvTable;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(t) = CsvTable::parse(text) {
        assert!(t.rows.iter().all(|r| r.len() == t.header.len()));
        let back = CsvTable::parse(&t.to_csv_string()).expect("written tables parse");
        assert_eq!(back.header, t.header);
        assert_eq!(back.rows.len(), t.rows.len());
    }
});
