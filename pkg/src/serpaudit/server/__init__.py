from .app import (
    ConfigResponse,
    RegisterRequest,
    RegisterResponse,
    ServerConfigState,
    SubmitResponse,
    create_app,
)
from .export import (
    COLUMNS,
    CorpusEntry,
    export_corpus,
    export_corpus_text,
    import_corpus,
)
from .groups import (
    CONTROL_CAPACITY,
    CONTROL_FILL_ORDER,
    OBSERVATION_GROUP_ID,
    GroupKind,
    GroupTable,
    MemoryAssignmentState,
    NoEligibleGroup,
    StudyGroup,
    default_group_table,
    load_group_table,
)
from .store import ConsentMissing, Store, StudyMismatch, UnknownParticipant

__all__ = [
    "COLUMNS",
    "CONTROL_CAPACITY",
    "CONTROL_FILL_ORDER",
    "ConfigResponse",
    "ConsentMissing",
    "CorpusEntry",
    "GroupKind",
    "GroupTable",
    "MemoryAssignmentState",
    "NoEligibleGroup",
    "OBSERVATION_GROUP_ID",
    "RegisterRequest",
    "RegisterResponse",
    "ServerConfigState",
    "Store",
    "StudyGroup",
    "StudyMismatch",
    "SubmitResponse",
    "UnknownParticipant",
    "create_app",
    "default_group_table",
    "export_corpus",
    "export_corpus_text",
    "import_corpus",
    "load_group_table",
]
