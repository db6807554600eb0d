"""walspred: predict WALS typological rule values from word-aligned parallel
corpora, the values of other rules, and genealogical metadata."""

__version__ = "0.1.0"
