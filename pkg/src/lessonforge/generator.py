"""Plan generators behind one request/result contract.

Two implementations exist: :func:`deterministic_generate`, a pure rule-based
engine used by tests, the CLI, and offline work, and :func:`llm_generate`,
a remote chat-completion client with strict line-oriented output parsing and
a bounded retry loop. Both are valid arguments anywhere a generator port is
expected (``PlanDocument.global_update``, :func:`full_plan_generate`).
"""

from __future__ import annotations

import json
import os
import urllib.request
from dataclasses import dataclass, field

from .errors import (
    EmptyOutcomes,
    MalformedResponse,
    NoLibraryMatch,
    TransportError,
    UnknownActivityIds,
)
from .library import ActivityDescriptor, LibraryBundle, PhaseCategory, rank_by_keywords, tokenize
from .plan import (
    DEFAULT_ITEM_COUNT,
    HierarchyLevel,
    ITEM_LEVELS,
    Mode,
    PlanDocument,
)

OBJECTIVE_VERBS = ("identify", "demonstrate", "apply")
GENERIC_TOPIC = "the stated outcome"

LLM_RETRIES = 2

ENV_LLM_URL = "LESSONFORGE_LLM_URL"
ENV_LLM_KEY = "LESSONFORGE_LLM_KEY"
ENV_LLM_MODEL = "LESSONFORGE_LLM_MODEL"


@dataclass
class GeneratorRequest:
    """Everything a generator needs to produce one hierarchy level."""

    target_level: HierarchyLevel
    outcomes_text: str
    parent_items: list[tuple[str, str]] = field(default_factory=list)
    library_catalog: list[ActivityDescriptor] = field(default_factory=list)
    desired_count: int | None = DEFAULT_ITEM_COUNT

    def validate(self) -> None:
        if self.target_level is HierarchyLevel.OUTCOMES:
            raise ValueError("outcomes are always human-entered, never generated")
        if self.target_level in ITEM_LEVELS:
            if self.desired_count is None or self.desired_count < 1:
                raise ValueError("desiredCount must be at least 1 for item levels")


@dataclass
class GeneratedItem:
    text: str
    link: str | None = None


@dataclass
class GeneratorResult:
    """Ordered generator output: items for item levels, activity ids otherwise."""

    items: list
    generator_name: str
    raw_trace: str | None = None


# ----------------------------------------------------------------------
# deterministic generator


def _request_tokens(request: GeneratorRequest) -> list[str]:
    tokens = tokenize(request.outcomes_text)
    for _item_id, text in request.parent_items:
        tokens.extend(tokenize(text))
    return tokens


def _topic_clusters(request: GeneratorRequest) -> list[tuple[str, list[ActivityDescriptor]]]:
    """Matched descriptors grouped by primary tag, in rank order of first member."""
    ranked = rank_by_keywords(request.library_catalog, _request_tokens(request))
    clusters: dict[str, list[ActivityDescriptor]] = {}
    for descriptor, _count in ranked:
        clusters.setdefault(descriptor.keywords[0], []).append(descriptor)
    return list(clusters.items())


def deterministic_generate(request: GeneratorRequest) -> GeneratorResult:
    """Rule-based generation: a pure function of the request.

    Topics come from keyword matches between the outcome/parent tokens and
    the catalog; item texts are templated over those topics, and the
    activity sequence walks each topic cluster in instructional-phase order
    with all matched Application activities appended once at the end.
    """
    request.validate()
    clusters = _topic_clusters(request)

    if request.target_level is HierarchyLevel.ACTIVITIES:
        if not clusters:
            raise NoLibraryMatch("no library activity matches the outcome text")
        index_of = {d.activity_id: i for i, d in enumerate(request.library_catalog)}
        ordered: list[str] = []
        for _topic, members in clusters:
            staged = [d for d in members if d.phase is not PhaseCategory.APPLICATION]
            staged.sort(key=lambda d: (d.phase.order, index_of[d.activity_id]))
            ordered.extend(d.activity_id for d in staged)
        closing = [d for _topic, members in clusters for d in members
                   if d.phase is PhaseCategory.APPLICATION]
        closing.sort(key=lambda d: index_of[d.activity_id])
        ordered.extend(d.activity_id for d in closing)
        return GeneratorResult(items=ordered, generator_name="deterministic")

    topics = [topic for topic, _members in clusters] or [GENERIC_TOPIC]
    items: list[GeneratedItem] = []
    for position in range(request.desired_count):
        topic = topics[position % len(topics)]
        if request.target_level is HierarchyLevel.OBJECTIVES:
            verb = OBJECTIVE_VERBS[position % len(OBJECTIVE_VERBS)]
            text = f"Learner will be able to {verb} {topic}"
        elif request.target_level is HierarchyLevel.SKILLS:
            text = f"Perform {topic} correctly"
        else:
            text = f"Learner completes {topic} task meeting the stated tolerance"
        link = None
        if position < len(request.parent_items):
            link = request.parent_items[position][0]
        items.append(GeneratedItem(text=text, link=link))
    return GeneratorResult(items=items, generator_name="deterministic")


def full_plan_generate(outcomes_text: str, library: LibraryBundle, gen) -> PlanDocument:
    """Build a complete document: outcomes, then every level in cascade order."""
    if not outcomes_text.strip():
        raise EmptyOutcomes("outcomes text must not be blank")
    doc = PlanDocument(mode=Mode(library.library_id)
                       if library.library_id in (m.value for m in Mode) else Mode.WELDING)
    doc.set_outcomes(outcomes_text)
    doc.global_update(HierarchyLevel.OBJECTIVES, gen, library=library)
    return doc


# ----------------------------------------------------------------------
# LLM client


@dataclass
class LlmConfig:
    """Remote endpoint configuration, normally read from the environment."""

    url: str
    key: str = ""
    model: str = ""

    @classmethod
    def from_env(cls) -> "LlmConfig":
        url = os.environ.get(ENV_LLM_URL, "")
        if not url:
            raise TransportError(f"{ENV_LLM_URL} is not configured")
        return cls(url=url,
                   key=os.environ.get(ENV_LLM_KEY, ""),
                   model=os.environ.get(ENV_LLM_MODEL, ""))


_LEVEL_NOUNS = {
    HierarchyLevel.OBJECTIVES: "learning objectives",
    HierarchyLevel.SKILLS: "skills",
    HierarchyLevel.ASSESSMENT: "assessment criteria",
    HierarchyLevel.ACTIVITIES: "learning activities",
}


def render_prompt(request: GeneratorRequest) -> str:
    """Fixed prompt template demanding a strict ``index|text|link`` reply."""
    lines = [
        "You are filling in one level of an outcome-oriented lesson plan "
        "for instructor-led VR training.",
        "",
        "Learning outcomes:",
        request.outcomes_text.strip() or "(none)",
        "",
    ]
    if request.parent_items:
        lines.append("Items one level above (id | text):")
        for item_id, text in request.parent_items:
            lines.append(f"{item_id} | {text}")
        lines.append("")
    lines.append("Activity catalog (activityId | name | phase | keywords):")
    for descriptor in request.library_catalog:
        lines.append(f"{descriptor.activity_id} | {descriptor.name} | "
                     f"{descriptor.phase.value} | {' '.join(descriptor.keywords)}")
    lines.append("")
    noun = _LEVEL_NOUNS[request.target_level]
    if request.target_level is HierarchyLevel.ACTIVITIES:
        lines.append("Task: order the learning activities that teach these outcomes.")
        lines.append("Reply with one line per activity, nothing else, in the exact form:")
        lines.append("index|activityId|-")
        lines.append("Use only activityId values from the catalog above.")
    else:
        lines.append(f"Task: write exactly {request.desired_count} {noun}.")
        lines.append("Reply with one line per item, nothing else, in the exact form:")
        lines.append("index|text|link")
        lines.append("link is the id of the parent item the entry belongs to, "
                     "or - when it has none.")
    return "\n".join(lines)


def _parse_reply(reply: str, request: GeneratorRequest) -> list[tuple[str, str]]:
    """Parse ``index|text|link`` lines; raises MalformedResponse on any stray line."""
    rows: list[tuple[str, str]] = []
    for raw_line in reply.splitlines():
        line = raw_line.strip()
        if not line:
            continue
        parts = line.split("|")
        if len(parts) != 3 or not parts[0].strip().isdigit():
            raise MalformedResponse(f"line is not index|text|link: {line!r}")
        text = parts[1].strip()
        if not text:
            raise MalformedResponse(f"empty text field: {line!r}")
        link = parts[2].strip()
        rows.append((text, "" if link in ("", "-") else link))
    if not rows:
        raise MalformedResponse("reply contained no item lines")
    return rows


def _default_transport(config: LlmConfig):
    """POST chat-completion messages to the configured endpoint."""

    def send(messages: list[dict]) -> str:
        body = json.dumps({"model": config.model, "messages": messages}).encode("utf-8")
        http_request = urllib.request.Request(
            config.url,
            data=body,
            headers={
                "Content-Type": "application/json",
                "Authorization": f"Bearer {config.key}",
            },
        )
        with urllib.request.urlopen(http_request, timeout=60) as response:
            payload = json.load(response)
        return payload["choices"][0]["message"]["content"]

    return send


def llm_generate(request: GeneratorRequest, config: LlmConfig | None = None,
                 transport=None) -> GeneratorResult:
    """Remote generation with strict parsing and up to two corrective retries.

    ``transport`` takes chat messages and returns the assistant text; tests
    inject canned transports. Unknown activity ids are dropped rather than
    invented; when a reply names only unknown ids the call fails with
    :class:`UnknownActivityIds`.
    """
    request.validate()
    if transport is None:
        config = config or LlmConfig.from_env()
        transport = _default_transport(config)
    prompt = render_prompt(request)
    attempts: list[str] = []
    correction: str | None = None
    failure: MalformedResponse | None = None
    for _attempt in range(1 + LLM_RETRIES):
        content = prompt if correction is None else f"{prompt}\n\n{correction}"
        try:
            reply = transport([
                {"role": "system", "content": "You emit machine-readable lesson-plan "
                                              "lines and never add prose."},
                {"role": "user", "content": content},
            ])
        except Exception as exc:
            raise TransportError(f"LLM transport failed: {exc}") from exc
        attempts.append(reply)
        trace = "\n---\n".join(f"attempt {i + 1}:\n{text}" for i, text in enumerate(attempts))
        try:
            rows = _parse_reply(reply, request)
            if request.target_level is HierarchyLevel.ACTIVITIES:
                known = {d.activity_id for d in request.library_catalog}
                kept = [text for text, _link in rows if text in known]
                if not kept:
                    raise UnknownActivityIds(
                        "every returned activity id is absent from the catalog")
                return GeneratorResult(items=kept, generator_name="llm", raw_trace=trace)
            if len(rows) != request.desired_count:
                raise MalformedResponse(f"expected {request.desired_count} items, "
                                        f"got {len(rows)}")
            parent_ids = {item_id for item_id, _text in request.parent_items}
            items = [GeneratedItem(text=text, link=link if link in parent_ids else None)
                     for text, link in rows]
            return GeneratorResult(items=items, generator_name="llm", raw_trace=trace)
        except MalformedResponse as exc:
            failure = exc
            correction = (f"Your previous reply could not be used ({exc.message}). "
                          "Reply again with one line per item in the exact form "
                          "index|text|link and nothing else.")
    raise MalformedResponse(f"no parsable reply after {1 + LLM_RETRIES} attempts: "
                            f"{failure.message if failure else 'unknown reason'}")
