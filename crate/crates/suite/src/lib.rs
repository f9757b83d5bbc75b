//! Holds the `acceptance` test target. Run it with
//! `cargo test -p ica-emk-suite --test acceptance`.
