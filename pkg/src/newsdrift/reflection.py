"""Batch reflection and the per-domain opinion update.

Each agent holds one valence per taxonomy domain, clamped to [-2, 2], plus
an exposure counter. A batch of read articles produces a reflection outcome
naming the touched domains; applying it rewrites exactly those domains and
leaves every other domain untouched.

The deterministic rules mirror dissonance resolution: news agreeing with
the current leaning (or landing on a blank slate) is confirmed and absorbed;
stronger contradicting news revises the valence; weaker contradicting news
is either dismissed (a weak opinion decays toward zero) or reinforced (a
held opinion barely budges and a rationalizing cognition is recorded).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from . import prompts
from .errors import SchemaError, ValidationError
from .gateway import GenerationRequest, MockLexicon, clamp_valence, mock_sentiment
from .modes import AblationFlags
from .taxonomy import TopicTaxonomy

log = logging.getLogger(__name__)

WEAK_OPINION = 0.25
REINFORCE_KEEP = 0.9
DISMISS_KEEP = 0.5
NUDGE = 0.01


@dataclass
class OpinionState:
    agent_id: str
    valences: dict[str, float]
    exposures: dict[str, int]
    last_response: int | None = None
    year_cursor: int | None = None

    @classmethod
    def initial(cls, agent_id: str, taxonomy: TopicTaxonomy) -> "OpinionState":
        return cls(
            agent_id=agent_id,
            valences={name: 0.0 for name in taxonomy.names},
            exposures={name: 0 for name in taxonomy.names},
        )

    def advance_year(self, year: int):
        self.year_cursor = year

    def to_dict(self) -> dict:
        return {
            "agent_id": self.agent_id,
            "valences": dict(self.valences),
            "exposures": dict(self.exposures),
            "last_response": self.last_response,
            "year_cursor": self.year_cursor,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "OpinionState":
        return cls(
            agent_id=doc["agent_id"],
            valences={k: float(v) for k, v in doc["valences"].items()},
            exposures={k: int(v) for k, v in doc["exposures"].items()},
            last_response=doc.get("last_response"),
            year_cursor=doc.get("year_cursor"),
        )


@dataclass
class ReflectionOutcome:
    agent_id: str
    batch_id: str
    themes: list[str]
    reasoning: str
    domains: dict[str, dict]
    batch_counts: dict[str, int] = field(default_factory=dict)


def categorize_payload(payload, taxonomy: TopicTaxonomy, index=None) -> str:
    """Resolve an article's domain: stored category, else keyword rules."""
    if index is not None:
        stored = index.get(payload.article_id).category
        if stored:
            return stored
    return taxonomy.categorize(payload.headline + " " + payload.full_text)


def batch_domain_counts(payloads, taxonomy: TopicTaxonomy, index=None) -> dict[str, int]:
    counts: dict[str, int] = {}
    for payload in payloads:
        domain = categorize_payload(payload, taxonomy, index)
        counts[domain] = counts.get(domain, 0) + 1
    return counts


def _mock_domain_update(old: float, mean_sentiment: float,
                        no_cognitive: bool) -> tuple[str, float, list[str]]:
    """Deterministic dissonance resolution for one domain."""
    if no_cognitive:
        return "none", clamp_valence(old + mean_sentiment), []
    consonant = old == 0.0 or mean_sentiment == 0.0 or (old > 0) == (mean_sentiment > 0)
    if consonant:
        return "confirm", clamp_valence(old + mean_sentiment), []
    if abs(mean_sentiment) >= abs(old):
        return "revise", clamp_valence(old + mean_sentiment), []
    if abs(old) < WEAK_OPINION:
        return "dismiss", old * DISMISS_KEEP, []
    cognition = "the coverage looks one-sided, so my view stands"
    return "reinforce", old * REINFORCE_KEEP, [cognition]


def _mock_outcome(payloads, state: OpinionState, taxonomy: TopicTaxonomy,
                  lexicon: MockLexicon, critique: str | None,
                  no_cognitive: bool, index=None) -> dict:
    sentiments: dict[str, list[float]] = {}
    for payload in payloads:
        domain = categorize_payload(payload, taxonomy, index)
        score = mock_sentiment(payload.headline + " " + payload.full_text, lexicon)
        sentiments.setdefault(domain, []).append(score)

    domains = {}
    for domain in taxonomy.names:
        if domain not in sentiments:
            continue
        scores = sentiments[domain]
        mean = sum(scores) / len(scores)
        if critique is not None:
            mean = mean / 2.0
        old = state.valences[domain]
        action, new, cognitions = _mock_domain_update(old, mean, no_cognitive)
        new = round(new, 6)
        if new == old:
            continue
        domains[domain] = {
            "action": action,
            "new_valence": new,
            "cognitions": cognitions,
        }
    themes = sorted(sentiments)
    reasoning = (
        f"weighed {len(payloads)} articles across {len(sentiments)} domains; "
        f"updated {len(domains)}"
    )
    return {"themes": themes, "reasoning": reasoning, "domains": domains}


def reflect_batch(profile, payloads, state: OpinionState, gateway,
                  taxonomy: TopicTaxonomy, lexicon: MockLexicon,
                  ablation: AblationFlags, batch_id: str, tag: str,
                  critique: str | None = None, index=None) -> ReflectionOutcome:
    if not payloads:
        raise ValidationError("reflection needs at least one article")

    counts = batch_domain_counts(payloads, taxonomy, index)
    mock = _mock_outcome(payloads, state, taxonomy, lexicon, critique,
                         ablation.no_cognitive, index)
    system, user = prompts.render_reflection(
        profile,
        opinions=format_opinions(state, taxonomy),
        news_list=prompts.format_news_list(payloads),
        devils_advocate_response=critique,
        no_profile=ablation.no_profile,
        no_cognitive=ablation.no_cognitive,
    )
    request = GenerationRequest(system, user, "reflection_update", tag)
    try:
        parsed = gateway.generate(request, mock_value=mock)
    except SchemaError as exc:
        log.warning("reflection for %s produced no update (%s)", batch_id, exc)
        return ReflectionOutcome(state.agent_id, batch_id, [], "", {}, counts)

    domains = {}
    for name, entry in parsed["domains"].items():
        if name not in taxonomy.names:
            log.warning("dropping unknown domain %r in %s", name, batch_id)
            continue
        entry = dict(entry)
        if ablation.no_cognitive:
            entry["action"] = "none"
        old = state.valences[name]
        if gateway.mode == "remote" and entry["new_valence"] == old:
            nudged = old - NUDGE if old > 0 else old + NUDGE if old < 0 else old - NUDGE
            entry["new_valence"] = round(clamp_valence(nudged), 6)
        if entry["new_valence"] == old:
            continue
        domains[name] = entry
    return ReflectionOutcome(
        agent_id=state.agent_id,
        batch_id=batch_id,
        themes=parsed["themes"],
        reasoning=parsed["reasoning"],
        domains=domains,
        batch_counts=counts,
    )


def apply_updates(state: OpinionState, outcome: ReflectionOutcome,
                  year: int) -> tuple[OpinionState, list[dict]]:
    """Rewrite touched domains, bump their exposures, freeze the rest."""
    new_state = OpinionState(
        agent_id=state.agent_id,
        valences=dict(state.valences),
        exposures=dict(state.exposures),
        last_response=state.last_response,
        year_cursor=state.year_cursor,
    )
    updates = []
    for domain, entry in outcome.domains.items():
        if domain not in state.valences:
            log.warning("rejecting update for unknown domain %r", domain)
            continue
        old = state.valences[domain]
        new = clamp_valence(float(entry["new_valence"]))
        new_state.valences[domain] = new
        new_state.exposures[domain] += outcome.batch_counts.get(domain, 0)
        updates.append({
            "agent_id": state.agent_id,
            "year": year,
            "domain": domain,
            "old_valence": old,
            "delta": round(new - old, 6),
            "new_valence": new,
            "action": entry["action"],
            "batch_id": outcome.batch_id,
        })
    return new_state, updates


def format_opinions(state: OpinionState, taxonomy: TopicTaxonomy) -> str:
    lines = []
    for name in taxonomy.names:
        lines.append(
            f"- {name}: valence {state.valences[name]:+.3f}, "
            f"exposures {state.exposures[name]}"
        )
    return "\n".join(lines)
