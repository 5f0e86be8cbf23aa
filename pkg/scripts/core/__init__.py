from .exceptions import (
    DodBenchError,
    InvalidParameterError,
    InvalidScaleFactor,
    ConfigError,
    MalformedXml,
    OversizedElement,
    CorruptRecord,
    DuplicateRecordId,
    IoFailure,
    DataFileNotFoundError,
    ArityMismatch,
    QueryTextError,
    EmptyPopulation,
    UnsupportedCombination,
    BackendUnreachable,
    QueryTimeout,
    AdapterFailure,
    CountMismatch,
)
from .model import (
    CanonicalRecord,
    RecordKind,
    VenueRef,
    VenueType,
    ScaleFactor,
    TermParam,
    validate_record,
    parse_terms,
)
