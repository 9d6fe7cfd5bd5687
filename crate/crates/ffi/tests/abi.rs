use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::ptr;

use mwelex_ffi::*;

fn demo_source() -> CString {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/demo.tsv");
    CString::new(std::fs::read_to_string(path).unwrap()).unwrap()
}

unsafe fn take(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_string();
    mwelex_string_free(s);
    out
}

unsafe fn last_error() -> String {
    let p = mwelex_last_error_message();
    assert!(!p.is_null());
    CStr::from_ptr(p).to_string_lossy().into_owned()
}

struct Fixture {
    reg: *mut MwelexRegistry,
    table: *mut MwelexTable,
}

impl Fixture {
    fn demo() -> Self {
        unsafe {
            let reg = mwelex_registry_standard();
            let mut table = ptr::null_mut();
            let src = demo_source();
            assert_eq!(mwelex_table_parse(reg, src.as_ptr(), &mut table), MwelexStatus::Ok);
            Fixture { reg, table }
        }
    }
}

impl Drop for Fixture {
    fn drop(&mut self) {
        unsafe {
            mwelex_table_free(self.table);
            mwelex_registry_free(self.reg);
        }
    }
}

#[test]
fn parse_count_and_serialize() {
    let f = Fixture::demo();
    unsafe {
        assert_eq!(mwelex_table_entry_count(f.table), 18);
        let mut out = ptr::null_mut();
        assert_eq!(mwelex_table_serialize(f.table, &mut out), MwelexStatus::Ok);
        let text = take(out);
        let reg = mwelex::standard_registry();
        let original = mwelex::parse_table(demo_source().to_str().unwrap(), &reg).unwrap();
        assert_eq!(mwelex::parse_table(&text, &reg).unwrap(), original);
    }
}

#[test]
fn parse_errors_carry_a_message() {
    unsafe {
        let reg = mwelex_registry_standard();
        let mut table = ptr::null_mut();
        let bad = CString::new("#table x\nid\tlemma\tpattern\tpos\tno-such-feature\n").unwrap();
        let st = mwelex_table_parse(reg, bad.as_ptr(), &mut table);
        assert_eq!(st, MwelexStatus::ParseError);
        assert!(table.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(mwelex_table_parse(reg, ptr::null(), &mut table), MwelexStatus::NullPointer);
        mwelex_registry_free(reg);
    }
}

#[test]
fn validate_and_classify_json() {
    let f = Fixture::demo();
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(mwelex_table_validate_json(f.table, f.reg, true, &mut out), MwelexStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        assert_eq!(v.as_array().unwrap().len(), 0);

        assert_eq!(mwelex_table_classify_json(f.table, f.reg, true, &mut out), MwelexStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        let on_time = v
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["entry_id"] == "on-time")
            .unwrap();
        assert_eq!(on_time["fig1"]["Ok"]["leaf"], "PPCompatibleWithBe");
        assert_eq!(on_time["fig2"]["Ok"]["leaf"], "CopularPredPP");
        assert_eq!(on_time["consistent"], true);
    }
}

#[test]
fn statistics() {
    unsafe {
        let (a, b) = (
            CString::new("+ + + + + - - - + -").unwrap(),
            CString::new("+ + + + + - - - - +").unwrap(),
        );
        let mut k = 0.0;
        assert_eq!(mwelex_kappa(a.as_ptr(), b.as_ptr(), &mut k), MwelexStatus::Ok);
        assert!((k - 0.28 / 0.48).abs() < 1e-12);

        let flat = CString::new("+ + +").unwrap();
        assert_eq!(mwelex_kappa(flat.as_ptr(), flat.as_ptr(), &mut k), MwelexStatus::Undefined);
        assert_eq!(last_error(), "degenerate-marginals");

        let src = CString::new(
            "#table t\nid\tlemma\tpattern\tpos\tdative-shift\tpassivization\n\
             a\ta\ton time\tPP\t+\t+\nb\tb\ton time\tPP\t-\t+\nc\tc\ton time\tPP\t-\t-\n\
             d\td\ton time\tPP\t+\t-\ne\te\ton time\tPP\t+\t+\n",
        )
        .unwrap();
        let reg = mwelex_registry_standard();
        let mut t = ptr::null_mut();
        assert_eq!(mwelex_table_parse(reg, src.as_ptr(), &mut t), MwelexStatus::Ok);
        let (f, g) = (CString::new("passivization").unwrap(), CString::new("dative-shift").unwrap());
        let (mut r, mut n) = (0.0, 0usize);
        assert_eq!(mwelex_pearson(t, reg, f.as_ptr(), g.as_ptr(), &mut r, &mut n), MwelexStatus::Ok);
        assert_eq!(n, 5);
        assert!((r - 1.0 / 6.0).abs() < 1e-12);
        let svc = CString::new("causative-verbs").unwrap();
        assert_eq!(
            mwelex_pearson(t, reg, svc.as_ptr(), g.as_ptr(), &mut r, &mut n),
            MwelexStatus::InvalidArgument
        );
        mwelex_table_free(t);
        mwelex_registry_free(reg);
    }
}

#[test]
fn match_spans() {
    let f = Fixture::demo();
    unsafe {
        let corpus = CString::new("this dealt/deal my hopes a blow\nnothing here\n").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(mwelex_match_json(f.table, corpus.as_ptr(), 5, 2, &mut out), MwelexStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
        let spans = v.as_array().unwrap();
        assert_eq!(spans.len(), 1);
        assert_eq!(spans[0]["variant_id"], "dative");
        assert_eq!(spans[0]["doc"], 1);
    }
}

#[test]
fn null_handles_are_rejected() {
    unsafe {
        let mut out = ptr::null_mut();
        assert_eq!(mwelex_table_serialize(ptr::null(), &mut out), MwelexStatus::NullPointer);
        assert_eq!(mwelex_table_entry_count(ptr::null()), 0);
        mwelex_table_free(ptr::null_mut());
        mwelex_registry_free(ptr::null_mut());
        mwelex_string_free(ptr::null_mut());
        assert!(!CStr::from_ptr(mwelex_version()).to_bytes().is_empty());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/mwelex.h");
    assert!(header.exists());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("probe.c");
    std::fs::write(
        &src,
        format!(
            "#include \"{}\"\nint main(void) {{ MwelexStatus s = MWELEX_STATUS_OK; return (int)s; }}\n",
            header.display()
        ),
    )
    .unwrap();
    let Ok(status) = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(&src)
        .status()
    else {
        eprintln!("no C compiler; header syntax not checked");
        return;
    };
    assert!(status.success());
}
