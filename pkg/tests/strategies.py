"""Hypothesis strategies for protocol values."""

from hypothesis import strategies as st

from mobisense.formats import FormatKey
from mobisense.protocol import (
    CustomDataEndPoint,
    EventCondition,
    FileDataEndPoint,
    HttpDataEndPoint,
    ImmediateTrigger,
    Measure,
    MemoryDataEndPoint,
    PeriodicTrigger,
    RecurrentScheduledTrigger,
    SamplingEventTrigger,
    ScheduledTrigger,
    StudyProtocol,
    Task,
)

segment = st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True)
format_keys = st.builds(FormatKey, segment, segment)
text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=12)
# up to year 2200, whole milliseconds
instants = st.integers(min_value=0, max_value=7_258_118_400_000)

periodic = st.builds(PeriodicTrigger, st.integers(1, 10**9))
recurrent = st.builds(RecurrentScheduledTrigger, st.integers(0, 23), st.integers(0, 59),
                      st.none() | st.integers(0, 6))
triggers = st.one_of(
    st.just(ImmediateTrigger()),
    periodic,
    st.builds(ScheduledTrigger, instants),
    recurrent,
    st.builds(SamplingEventTrigger, format_keys,
              st.none() | st.builds(EventCondition, text, text)),
)


@st.composite
def measures(draw, type_=format_keys):
    config = draw(st.dictionaries(st.from_regex(r"x_[a-z]{1,6}", fullmatch=True), text,
                                  max_size=3))
    if draw(st.booleans()):
        freq = draw(st.integers(1, 10**8))
        config["frequency_ms"] = str(freq)
        if draw(st.booleans()):
            config["duration_ms"] = str(draw(st.integers(0, freq)))
    return Measure(draw(type_), draw(st.booleans()), config)


@st.composite
def tasks(draw):
    ms = draw(st.lists(measures(), min_size=1, max_size=4, unique_by=lambda m: m.type))
    return Task(draw(text), tuple(ms))


endpoints = st.one_of(
    st.just(MemoryDataEndPoint()),
    st.builds(FileDataEndPoint, st.integers(1024, 10**7), st.booleans(), st.booleans()),
    st.builds(HttpDataEndPoint,
              st.sampled_from(["http://localhost:8080/ingest", "https://example.org/up"]),
              st.integers(1, 1000), st.integers(0, 10)),
    st.builds(CustomDataEndPoint, st.sampled_from(["s3", "firebase"]),
              st.dictionaries(segment.filter(lambda k: k != "kind"), st.integers() | text,
                              max_size=3)),
)

protocols = st.builds(
    StudyProtocol,
    id=text.filter(bool),
    user_id=text.filter(bool),
    data_end_point=endpoints,
    trigger_tasks=st.lists(st.tuples(triggers, tasks()), min_size=1, max_size=4),
    name=text,
    data_format=st.sampled_from(["carp", "omh"]) | segment,
    privacy_enabled=st.booleans(),
)
