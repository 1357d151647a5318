//! Documents, labels, token annotations and corpus-level bookkeeping.

mod conllu;
mod document;
mod labels;
mod manifest;
mod split;
mod summary;

pub use conllu::{ingest_token_annotations, parse_conllu, Sentence, TokenAnnotation, TokenStore};
pub use document::{
    ingest_documents, parse_documents, write_documents, Corpus, Document, IngestOptions,
    IngestReport, Rejected,
};
pub use labels::{
    ingest_labels, parse_labels, write_labels, LabelKind, LabelReport, LabelSet, LabeledCorpus,
    LabeledDoc, Violation, FRAME_FIELDS, LABEL_HEADER,
};
pub use manifest::{ingest_manifest, parse_manifest, CorpusManifest, ManifestRow, ManifestSummary, Month};
pub use split::{split_and_fold, SplitPlan};
pub use summary::{dataset_stats, FrameCountHistogram, IssueStats, StatsReport};

macro_rules! string_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, ::serde::Serialize, ::serde::Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }

            pub fn index(self) -> usize {
                Self::ALL.iter().position(|v| *v == self).unwrap()
            }
        }

        impl ::std::fmt::Display for $name {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl ::std::str::FromStr for $name {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err(format!(
                        "invalid {} `{}` (expected one of: {})",
                        stringify!($name).to_lowercase(),
                        other,
                        [$($text),+].join(", ")
                    )),
                }
            }
        }
    };
}

string_enum!(
    /// Issue area a tweet was collected for.
    Issue { Guns => "guns", Immigration => "immigration", Lgbtq => "lgbtq" }
);
string_enum!(
    /// Protest activity level of the collection month.
    Activity { High => "high", Average => "average" }
);
string_enum!(AuthorRole { Journalist => "journalist", Smo => "smo", Other => "other" });
string_enum!(TweetType { Broadcast => "broadcast", Quote => "quote", Reply => "reply" });
string_enum!(
    /// Message-level stance. Enum order is the tie-break order used by the
    /// stance classifier (`progressive < conservative < neutral`). Some
    /// tables call the progressive class "liberal"; the two are synonyms.
    Stance { Progressive => "progressive", Conservative => "conservative", Neutral => "neutral" }
);

pub(crate) use string_enum;
