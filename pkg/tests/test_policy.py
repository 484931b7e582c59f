"""Policy providers: prompt mechanics, replay, offline heuristics, remote wire."""
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from types import SimpleNamespace

import httpx
import pytest

from molsearch.descriptors import descriptor_names
from molsearch.molgraph import parse_smiles
from molsearch.molgraph.match import has_match
from molsearch.molgraph.pattern import lookup_pattern
from molsearch.policy import (
    MAX_SENTENCES,
    ActionProposal,
    HeuristicProvider,
    PolicyRequest,
    PromptError,
    ProviderError,
    RemoteConfig,
    RemoteProvider,
    ScriptedProvider,
    extract_fenced,
    load_template,
    propose_actions,
    rectify,
    synthesize_knowledge,
)
from molsearch.ruledsl import ErrorTrace, eval_rule, ground_rules, parse_rule

FIG8_CORPUS = [
    "Calculate the number of polar functional groups present in the molecule.",
    "Calculate the molecular weight.",
    "Calculate the number of hydrogen bond donors in the structure.",
    "Calculate the number of hydrogen bond acceptors in the structure.",
    "Calculate the presence of ionic groups.",
    "Calculate the degree of branching in aliphatic chains.",
    "Calculate the presence of aromatic rings.",
    "Calculate the overall charge of the molecule.",
    "Calculate the logP value.",
    "Calculate the presence of hydrophilic substituents.",
    "Calculate the size of the hydrophobic regions.",
    "Calculate the presence of functional groups that can ionize.",
    "Calculate the steric hindrance around polar groups.",
    "Calculate the number of carbon atoms.",
    "Calculate the presence of cyclic structures.",
    "Calculate the presence of fluorine atoms.",
    "Calculate the presence of sulfur or phosphorus.",
    "Calculate the molecular symmetry.",
    "Calculate the presence of multiple functional groups.",
    "Calculate the pKa of acidic or basic groups.",
]


def fenced(body: str) -> str:
    return f"chatter before\n```\n{body}\n```\nchatter after"


# ---------------------------------------------------------------- templates

class TestTemplates:
    def test_all_three_load_with_expected_placeholders(self):
        assert load_template("P0").placeholders() == {"task"}
        assert load_template("Pfix").placeholders() == {"sentence", "previous", "error"}
        assert load_template("Expand").placeholders() == {"task", "state", "rules", "k"}

    def test_unknown_template_id(self):
        with pytest.raises(PromptError):
            load_template("P1")

    @pytest.mark.parametrize(
        ("template_id", "values"),
        [
            ("P0", {"task": "optimize logp"}),
            ("Pfix", {"sentence": "s", "previous": "p", "error": "e"}),
            ("Expand", {"task": "t", "state": "s", "rules": "r", "k": 5}),
        ],
    )
    def test_rendered_prompts_contain_no_brace(self, template_id, values):
        rendered = load_template(template_id).render(**values)
        assert "{" not in rendered
        assert "}" not in rendered
        for value in values.values():
            assert str(value) in rendered

    def test_missing_placeholder_rejected(self):
        with pytest.raises(PromptError, match="task"):
            load_template("P0").render()

    def test_brace_in_value_rejected(self):
        with pytest.raises(PromptError):
            load_template("P0").render(task="a {sneaky} value")


class TestExtractFenced:
    def test_first_block_wins(self):
        text = "intro\n```\nfirst\n```\nmiddle\n```\nsecond\n```"
        assert extract_fenced(text) == "first\n"

    def test_language_tag_ignored(self):
        assert extract_fenced("```python\nx = 1\n```") == "x = 1\n"

    def test_no_block_is_none(self):
        assert extract_fenced("no fences here") is None

    def test_unterminated_block_is_none(self):
        assert extract_fenced("```\nnever closed") is None


# ----------------------------------------------------------------- scripted

class TestScriptedProvider:
    def test_replays_in_order(self):
        provider = ScriptedProvider([
            {"kind": "ground", "response": fenced("desc(logp)")},
            {"kind": "ground", "response": fenced("desc(qed)")},
        ])
        assert provider.ground("a") == "desc(logp)"
        assert provider.ground("b") == "desc(qed)"

    def test_exhaustion_fails_loudly(self):
        provider = ScriptedProvider([])
        with pytest.raises(ProviderError, match="exhausted"):
            provider.ground("x")

    def test_kind_mismatch_fails_loudly(self):
        provider = ScriptedProvider([{"kind": "propose", "response": "x"}])
        with pytest.raises(ProviderError, match="out of order"):
            provider.ground("x")

    def test_record_validation(self):
        with pytest.raises(ValueError, match="kind"):
            ScriptedProvider([{"kind": "oracle", "response": "x"}])
        with pytest.raises(ValueError, match="response"):
            ScriptedProvider([{"kind": "ground"}])

    def test_from_file_checks_schema(self, tmp_path):
        good = tmp_path / "script.json"
        good.write_text(json.dumps({
            "schema": "policy-script/1",
            "records": [{"kind": "ground", "response": fenced("1.0")}],
        }))
        provider = ScriptedProvider.from_file(good)
        assert provider.ground("s") == "1.0"
        assert provider.provider_id == "scripted:script.json"

        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"schema": "other/2", "records": []}))
        with pytest.raises(ValueError, match="schema"):
            ScriptedProvider.from_file(bad)

    def test_concurrent_callers_each_get_one_record(self):
        n = 40
        provider = ScriptedProvider(
            [{"kind": "ground", "response": fenced(f"r{i}")} for i in range(n)]
        )
        with ThreadPoolExecutor(max_workers=8) as pool:
            results = list(pool.map(lambda i: provider.ground("s"), range(n)))
        assert sorted(results) == sorted(f"r{i}" for i in range(n))
        assert provider.remaining == 0

    def test_broken_then_fixed_through_grounding_loop(self):
        provider = ScriptedProvider([
            {"kind": "ground", "response": fenced("desc(molecular_weight < 500")},
            {"kind": "rectify", "response": fenced("desc(molecular_weight) < 500")},
        ])
        rules, traces = ground_rules(["weight under 500"], provider)
        (rule,) = rules
        assert rule.source == "desc(molecular_weight) < 500"
        assert rule.retries == 1
        assert len(traces) == 1


# ---------------------------------------------------------------- heuristic

class TestHeuristicProvider:
    def test_corpus_grounds_with_no_drops(self):
        provider = HeuristicProvider()
        rules, traces = ground_rules(FIG8_CORPUS, provider)
        assert len(rules) >= 18  # acceptance floor; currently all 20 ground
        assert traces == []
        probe = parse_smiles("CCO")
        for rule in rules:
            eval_rule(rule.ast, probe)  # must not raise

    def test_weight_sentence_grounds_to_weight_descriptor(self):
        provider = HeuristicProvider()
        assert provider.ground("Calculate the molecular weight.") == (
            "desc(molecular_weight)"
        )

    def test_synthesis_covers_lipophilicity_vocabulary(self):
        task = SimpleNamespace(kind="optimization", objective="logp")
        sentences = synthesize_knowledge(task, HeuristicProvider())
        assert 1 <= len(sentences) <= MAX_SENTENCES
        assert all(s.startswith("Calculate") for s in sentences)
        joined = " ".join(sentences)
        for word in ("logP", "donors", "acceptors", "aromatic"):
            assert word in joined

    def test_synthesis_for_prediction_task(self):
        task = SimpleNamespace(kind="prediction", metric="rmse")
        sentences = synthesize_knowledge(task, HeuristicProvider())
        assert all(s.startswith("Calculate") for s in sentences)
        assert len(sentences) == len({s.lower() for s in sentences})

    def test_proposals_on_phenol_include_o_methylation(self):
        mol = parse_smiles("Oc1ccccc1")
        assert has_match(mol, lookup_pattern("phenol"))  # premise, independently
        state = SimpleNamespace(smiles="Oc1ccccc1")
        proposals = propose_actions(state, [], HeuristicProvider(), k=6)
        assert proposals
        assert any(p.transform == "o_methylation" for p in proposals)
        for p in proposals:
            parse_smiles(p.smiles)  # every candidate is a valid structure

    def test_proposals_come_back_distinct_and_capped(self):
        state = SimpleNamespace(smiles="Oc1ccccc1O")
        proposals = propose_actions(state, [], HeuristicProvider(), k=3)
        assert len(proposals) <= 3
        smiles = [p.smiles for p in proposals]
        assert len(set(smiles)) == len(smiles)

    def test_no_applicable_edit_is_a_dead_end(self):
        state = SimpleNamespace(smiles="C")
        assert propose_actions(state, [], HeuristicProvider(), k=5) == []

    def test_prediction_proposals_skip_existing_features(self):
        state = SimpleNamespace(features=("molecular_weight", "logp"))
        proposals = propose_actions(state, [], HeuristicProvider(), k=4)
        names = [p.feature for p in proposals]
        assert names
        assert not set(names) & {"molecular_weight", "logp"}

    def test_prediction_proposals_empty_when_registry_exhausted(self):
        state = SimpleNamespace(features=tuple(descriptor_names()))
        assert propose_actions(state, [], HeuristicProvider(), k=5) == []

    def test_rectify_guards_divided_by_zero(self):
        trace = ErrorTrace("r1", "eval", "division by zero", 2)
        fixed = rectify(
            "1 / desc(formal_charge_total)", trace, HeuristicProvider(),
            sentence="irrelevant",
        )
        assert "0.001" in fixed
        value = eval_rule(parse_rule(fixed), parse_smiles("C"))
        assert value == pytest.approx(1000.0)

    def test_rectify_regrounds_parse_failures_from_sentence(self):
        trace = ErrorTrace("r1", "parse", "unexpected character '?'", 0)
        fixed = rectify("???", trace, HeuristicProvider(),
                        sentence="Calculate the molecular weight.")
        assert fixed == "desc(molecular_weight)"

    def test_rectify_falls_back_to_a_known_good_rule(self):
        trace = ErrorTrace("r1", "parse", "boom", 0)
        fixed = rectify("???", trace, HeuristicProvider(), sentence="")
        parse_rule(fixed)  # always grounds

    def test_deterministic_across_instances(self):
        state = SimpleNamespace(smiles="Cc1ccc(O)cc1")
        a = propose_actions(state, ["x"], HeuristicProvider(), k=5)
        b = propose_actions(state, ["x"], HeuristicProvider(), k=5)
        assert a == b


# ------------------------------------------------------------------- remote

def make_remote(handler, **config_kwargs):
    config = RemoteConfig(
        endpoint="https://example.invalid/v1/chat",
        model="test-model",
        **config_kwargs,
    )
    return RemoteProvider(config, transport=httpx.MockTransport(handler))


class TestRemoteProvider:
    def test_wire_shape_and_sampling_passthrough(self):
        seen = {}

        def handler(request):
            seen["body"] = json.loads(request.content)
            return httpx.Response(200, json={
                "choices": [{"message": {"content": fenced("desc(tpsa)")}}]
            })

        provider = make_remote(handler, sampling=(("temperature", 0.2),))
        try:
            trace = ErrorTrace("r1", "parse", "unexpected character '?'", 4)
            out = rectify("??x?", trace, provider, sentence="a sentence")
        finally:
            provider.close()
        assert out == "desc(tpsa)"
        body = seen["body"]
        assert body["model"] == "test-model"
        assert body["temperature"] == 0.2
        assert body["messages"][0]["role"] == "user"
        content = body["messages"][0]["content"]
        assert "unexpected character '?'" in content  # verbatim error
        assert "position 4" in content

    def test_auth_token_read_from_environment(self, monkeypatch):
        seen = {}

        def handler(request):
            seen["auth"] = request.headers.get("authorization")
            return httpx.Response(200, json={
                "choices": [{"message": {"content": fenced("1.0")}}]
            })

        monkeypatch.setenv("MOLSEARCH_API_KEY", "tok-123")
        provider = make_remote(handler)
        try:
            provider.ground("s")
        finally:
            provider.close()
        assert seen["auth"] == "Bearer tok-123"

        monkeypatch.delenv("MOLSEARCH_API_KEY")
        provider = make_remote(handler)
        try:
            provider.ground("s")
        finally:
            provider.close()
        assert seen["auth"] is None

    def test_http_error_becomes_provider_error(self):
        provider = make_remote(lambda request: httpx.Response(500, text="boom"))
        try:
            with pytest.raises(ProviderError, match="remote provider failed"):
                provider.respond(PolicyRequest(kind="ground", prompt="p"))
        finally:
            provider.close()

    def test_timeout_becomes_provider_error(self):
        def handler(request):
            raise httpx.ConnectTimeout("too slow")

        provider = make_remote(handler, timeout=0.01)
        try:
            with pytest.raises(ProviderError, match="remote provider failed"):
                provider.respond(PolicyRequest(kind="ground", prompt="p"))
        finally:
            provider.close()

    def test_malformed_response_shape(self):
        provider = make_remote(lambda request: httpx.Response(200, json={"ok": True}))
        try:
            with pytest.raises(ProviderError, match="chat-completion"):
                provider.respond(PolicyRequest(kind="ground", prompt="p"))
        finally:
            provider.close()

    def test_synthesis_through_remote(self):
        body = "Calculate the molecular weight.\nCalculate the logP value."

        def handler(request):
            return httpx.Response(200, json={
                "choices": [{"message": {"content": fenced(body)}}]
            })

        provider = make_remote(handler)
        try:
            task = SimpleNamespace(kind="optimization", objective="logp")
            sentences = synthesize_knowledge(task, provider)
        finally:
            provider.close()
        assert sentences == [
            "Calculate the molecular weight.",
            "Calculate the logP value.",
        ]


# ------------------------------------------------------- synthesis parsing

class StaticProvider(HeuristicProvider):
    """Answers every request with one fixed response text."""

    provider_id = "static"

    def __init__(self, response):
        self.response = response

    def respond(self, request):
        return self.response


class TestSynthesisParsing:
    task = SimpleNamespace(kind="optimization", objective="logp")

    def test_numbering_and_bullets_stripped(self):
        provider = StaticProvider(fenced(
            "1. Calculate the molecular weight.\n"
            "2) Calculate the logP value.\n"
            "- Calculate the presence of aromatic rings.\n"
        ))
        sentences = synthesize_knowledge(self.task, provider)
        assert sentences == [
            "Calculate the molecular weight.",
            "Calculate the logP value.",
            "Calculate the presence of aromatic rings.",
        ]

    def test_duplicates_deduplicated_case_insensitively(self):
        provider = StaticProvider(fenced(
            "Calculate the molecular weight.\n"
            "calculate the molecular weight.\n"
            "CALCULATE THE MOLECULAR WEIGHT.\n"
            "Calculate the logP value.\n"
        ))
        sentences = synthesize_knowledge(self.task, provider)
        assert sentences == [
            "Calculate the molecular weight.",
            "Calculate the logP value.",
        ]

    def test_non_calculate_lines_dropped_with_warning(self, caplog):
        provider = StaticProvider(fenced(
            "Calculate the molecular weight.\n"
            "Consider the molecular shape.\n"
        ))
        with caplog.at_level(logging.WARNING):
            sentences = synthesize_knowledge(self.task, provider)
        assert sentences == ["Calculate the molecular weight."]
        assert any("Consider the molecular shape." in r.getMessage()
                   for r in caplog.records)

    def test_overlong_list_truncated_to_cap(self, caplog):
        body = "\n".join(f"Calculate property number {i}." for i in range(60))
        with caplog.at_level(logging.WARNING):
            sentences = synthesize_knowledge(self.task, StaticProvider(fenced(body)))
        assert len(sentences) == MAX_SENTENCES

    def test_no_usable_sentences_is_an_error(self):
        with pytest.raises(ProviderError, match="no usable"):
            synthesize_knowledge(self.task, StaticProvider(fenced("nothing here")))

    def test_missing_fence_is_an_error(self):
        with pytest.raises(ProviderError, match="fenced"):
            synthesize_knowledge(self.task, StaticProvider("bare text"))


# -------------------------------------------------------- proposal parsing

class TestProposalParsing:
    opt_state = SimpleNamespace(smiles="Oc1ccccc1")
    pred_state = SimpleNamespace(features=("molecular_weight",))

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            propose_actions(self.opt_state, [], HeuristicProvider(), k=0)

    def test_structure_lines_parsed_fully(self):
        provider = StaticProvider(fenced(
            "COc1ccccc1 | mask the hydroxyl | o_methylation\n"
            "\n"
            "# a comment line\n"
            "Cc1ccccc1O | add a ring methyl\n"
            "apply:halogenation | chlorinate the ring\n"
        ))
        proposals = propose_actions(self.opt_state, [], provider, k=5)
        assert len(proposals) == 3
        assert proposals[0] == ActionProposal(
            rationale="mask the hydroxyl", smiles="COc1ccccc1",
            transform="o_methylation",
        )
        assert proposals[1].smiles == "Cc1ccccc1O"
        assert proposals[1].transform is None
        assert proposals[2].transform == "halogenation"
        assert proposals[2].smiles is None

    def test_cap_at_k(self):
        provider = StaticProvider(fenced(
            "\n".join(f"C{'C' * i} | candidate" for i in range(8))
        ))
        assert len(propose_actions(self.opt_state, [], provider, k=3)) == 3

    def test_missing_rationale_gets_placeholder(self):
        provider = StaticProvider(fenced("CCO"))
        (proposal,) = propose_actions(self.opt_state, [], provider, k=1)
        assert proposal.smiles == "CCO"
        assert proposal.rationale == "(no rationale given)"

    def test_invalid_smiles_not_validated_here(self):
        # validity is judged at expansion, where failures earn the penalty
        provider = StaticProvider(fenced("this-is-not-smiles | bold claim"))
        (proposal,) = propose_actions(self.opt_state, [], provider, k=2)
        assert proposal.smiles == "this-is-not-smiles"

    def test_no_fence_is_a_dead_end(self):
        assert propose_actions(self.opt_state, [], StaticProvider("text"), k=3) == []

    def test_prediction_filters_duplicates_and_unknown_names(self, caplog):
        provider = StaticProvider(fenced(
            "molecular_weight | already there\n"
            "made_up_descriptor | not registered\n"
            "logp | good\n"
            "logp | repeat within response\n"
            "tpsa | good\n"
        ))
        with caplog.at_level(logging.WARNING):
            proposals = propose_actions(self.pred_state, [], provider, k=5)
        assert [p.feature for p in proposals] == ["logp", "tpsa"]

    def test_proposal_validation(self):
        with pytest.raises(ValueError, match="rationale"):
            ActionProposal(rationale="", smiles="C")
        with pytest.raises(ValueError, match="candidate"):
            ActionProposal(rationale="r")
        with pytest.raises(ValueError, match="feature"):
            ActionProposal(rationale="r", feature="logp", smiles="C")

    def test_scripted_queued_fix_returned_verbatim(self):
        provider = ScriptedProvider([
            {"kind": "rectify", "response": fenced("desc(qed) >= 0.5")},
        ])
        trace = ErrorTrace("r1", "parse", "x", 0)
        assert rectify("bad", trace, provider) == "desc(qed) >= 0.5"
