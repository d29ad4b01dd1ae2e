"""Tree-to-source emission and the reference evaluator for emitted code."""

import random

import pytest

from gradegauge.dataset import (
    AttributeSchema,
    Categorical,
    ClassDistribution,
    Continuous,
    Role,
    Schema,
)
from gradegauge.errors import (
    CorruptDocument,
    InvalidIdentifier,
    MissingFeature,
)
from gradegauge.induction import (
    CategoricalSplit,
    ContinuousSplit,
    Internal,
    Leaf,
    ModelStats,
    TrainConfig,
    TrainedModel,
    count_leaves,
    count_nodes,
)
from gradegauge.codegen import (
    EmitDialect,
    compile_source,
    emit,
    evaluate_source,
    interpret,
    tested_features as emitted_params,
)

from conftest import ALL_COMBOS, ladder_label, random_record, random_tree_model

DIALECTS = tuple(EmitDialect)


def leaf(label: str, weight: float) -> Leaf:
    return Leaf(label, ClassDistribution({label: weight} if weight else {}))


def model_for(root, attrs) -> TrainedModel:
    schema = Schema(tuple(attrs) + (
        AttributeSchema("label", Categorical(("pass", "fail")),
                        Role.CLASS_LABEL),))
    return TrainedModel("C45", root, schema, TrainConfig().resolved("C45"),
                        ModelStats(int(root.distribution.total()),
                                   count_nodes(root), count_leaves(root)))


def three_way_model() -> TrainedModel:
    root = Internal(CategoricalSplit("f0"),
                    {"v0": leaf("fail", 2.0), "v1": leaf("pass", 5.0),
                     "v2": leaf("fail", 2.0)},
                    "fail", ClassDistribution({"pass": 5.0, "fail": 4.0}))
    return model_for(root, [AttributeSchema("f0",
                                            Categorical(("v0", "v1", "v2")))])


def test_pseudo_golden_text():
    assert emit(three_way_model(), EmitDialect.PSEUDO_CODE, "decide") == (
        'FUNCTION decide(f0)\n'
        '  IF f0 == "v1" THEN\n'
        '    RETURN "pass"\n'
        '  ELSE IF f0 == "v0" THEN\n'
        '    RETURN "fail"\n'
        '  ELSE\n'
        '    RETURN "fail"\n'
        '  END IF\n'
        'END FUNCTION\n')


def test_c_golden_text():
    assert emit(three_way_model(), EmitDialect.C_STYLE, "decide") == (
        'const char *decide(const char *f0) {\n'
        '    if (strcmp(f0, "v1") == 0) {\n'
        '        return "pass";\n'
        '    } else if (strcmp(f0, "v0") == 0) {\n'
        '        return "fail";\n'
        '    } else {\n'
        '        return "fail";\n'
        '    }\n'
        '}\n')


def test_python_golden_text():
    assert emit(three_way_model(), EmitDialect.PYTHON_STYLE, "decide") == (
        'def decide(f0):\n'
        '    if f0 == "v1":\n'
        '        return "pass"\n'
        '    elif f0 == "v0":\n'
        '        return "fail"\n'
        '    else:\n'
        '        return "fail"\n')


def continuous_model() -> TrainedModel:
    root = Internal(ContinuousSplit("score", 10.5),
                    {"<=": leaf("fail", 1.0), ">": leaf("pass", 6.0)},
                    "pass", ClassDistribution({"pass": 6.0, "fail": 1.0}))
    return model_for(root, [AttributeSchema("score", Continuous())])


def test_heavier_branch_leads_the_chain():
    src = emit(continuous_model(), EmitDialect.PSEUDO_CODE, "decide")
    assert src == ('FUNCTION decide(score)\n'
                   '  IF score > 10.5 THEN\n'
                   '    RETURN "pass"\n'
                   '  ELSE\n'
                   '    RETURN "fail"\n'
                   '  END IF\n'
                   'END FUNCTION\n')


def test_c_params_are_typed_by_attribute_kind():
    root = Internal(ContinuousSplit("score", 1.5),
                    {"<=": leaf("fail", 1.0),
                     ">": Internal(CategoricalSplit("kind"),
                                   {"x": leaf("pass", 2.0),
                                    "y": leaf("fail", 1.0)},
                                   "pass",
                                   ClassDistribution({"pass": 2.0,
                                                      "fail": 1.0}))},
                    "pass", ClassDistribution({"pass": 2.0, "fail": 2.0}))
    model = model_for(root, [AttributeSchema("kind", Categorical(("x", "y"))),
                             AttributeSchema("score", Continuous())])
    src = emit(model, EmitDialect.C_STYLE, "decide")
    assert src.splitlines()[0] == \
        "const char *decide(double score, const char *kind) {"


def test_branch_weight_ties_keep_insertion_order():
    root = Internal(CategoricalSplit("f0"),
                    {"v0": leaf("pass", 3.0), "v1": leaf("fail", 3.0),
                     "v2": leaf("pass", 3.0)},
                    "pass", ClassDistribution({"pass": 6.0, "fail": 3.0}))
    model = model_for(root, [AttributeSchema("f0",
                                             Categorical(("v0", "v1", "v2")))])
    lines = emit(model, EmitDialect.PSEUDO_CODE, "decide").splitlines()
    assert lines[1] == '  IF f0 == "v0" THEN'
    assert lines[3] == '  ELSE IF f0 == "v1" THEN'


def test_parameters_follow_first_use_and_skip_untested(ladder_model):
    params_line = emit(ladder_model, EmitDialect.PSEUDO_CODE,
                       "predict").splitlines()[0]
    names = params_line[len("FUNCTION predict("):-1].split(", ")
    assert names == emitted_params(ladder_model.root)
    assert names[0] == "percent"
    assert set(names) == {"percent", "merit", "type"}
    assert "gender" not in names


def test_include_untested_appends_schema_leftovers(ladder_model):
    src = emit(ladder_model, EmitDialect.PYTHON_STYLE, "predict",
               include_untested=True)
    head = src.splitlines()[0]
    names = head[len("def predict("):-2].split(", ")
    assert names == emitted_params(ladder_model.root) + ["gender"]
    # the extra parameter is accepted and ignored by the compiled function
    fn = compile_source(src, EmitDialect.PYTHON_STYLE)
    assert fn({"merit": "good", "gender": "Male", "percent": "distinction",
               "type": "AI"}) == "pass"


def test_invalid_function_names_rejected(ladder_model):
    for bad in ("", "1abc", "has space", "a-b", "fn()"):
        with pytest.raises(InvalidIdentifier):
            emit(ladder_model, EmitDialect.PSEUDO_CODE, bad)


def test_single_leaf_model_emits_one_return():
    model = model_for(leaf("pass", 4.0),
                      [AttributeSchema("f0", Categorical(("a", "b")))])
    for dialect in DIALECTS:
        src = emit(model, dialect, "decide")
        fn = compile_source(src, dialect)
        assert fn({}) == "pass"
    pseudo = emit(model, EmitDialect.PSEUDO_CODE, "decide")
    assert pseudo == 'FUNCTION decide()\n  RETURN "pass"\nEND FUNCTION\n'


def test_single_branch_node_descends_unconditionally():
    root = Internal(CategoricalSplit("f0"), {"a": leaf("pass", 3.0)},
                    "pass", ClassDistribution({"pass": 3.0}))
    model = model_for(root, [AttributeSchema("f0", Categorical(("a", "b")))])
    src = emit(model, EmitDialect.PSEUDO_CODE, "decide")
    assert src == 'FUNCTION decide(f0)\n  RETURN "pass"\nEND FUNCTION\n'


def test_emission_is_deterministic(ladder_model):
    for dialect in DIALECTS:
        first = emit(ladder_model, dialect, "predict_result")
        assert first == emit(ladder_model, dialect, "predict_result")


def test_pseudo_return_count_equals_leaf_count(ladder_model):
    src = emit(ladder_model, EmitDialect.PSEUDO_CODE, "predict")
    returns = [ln for ln in src.splitlines()
               if ln.strip().startswith("RETURN ")]
    assert len(returns) == count_leaves(ladder_model.root)


def test_all_dialects_match_the_tree_on_every_combination(ladder_model):
    for dialect in DIALECTS:
        src = emit(ladder_model, dialect, "predict")
        fn = compile_source(src, dialect)
        for merit, gender, percent, adm_type in ALL_COMBOS:
            record = {"merit": merit, "gender": gender, "percent": percent,
                      "type": adm_type}
            expected = ladder_label(merit, gender, percent, adm_type)
            assert interpret(ladder_model, record) == expected
            assert fn(record) == expected


def test_quoted_values_survive_emission_and_evaluation():
    tricky_a, tricky_b = 'say "hi"', "back\\slash"
    root = Internal(CategoricalSplit("f0"),
                    {tricky_a: leaf('pa"ss', 2.0), tricky_b: leaf("fail", 1.0)},
                    "fail", ClassDistribution({'pa"ss': 2.0, "fail": 1.0}))
    schema = Schema((
        AttributeSchema("f0", Categorical((tricky_a, tricky_b))),
        AttributeSchema("label", Categorical(('pa"ss', "fail")),
                        Role.CLASS_LABEL)))
    model = TrainedModel("ID3", root, schema, TrainConfig().resolved("ID3"),
                         ModelStats(3, 3, 2))
    for dialect in DIALECTS:
        src = emit(model, dialect, "decide")
        fn = compile_source(src, dialect)
        assert fn({"f0": tricky_a}) == 'pa"ss'
        assert fn({"f0": tricky_b}) == "fail"


def test_evaluator_requires_tested_parameters(ladder_model):
    # first_class rows descend into the merit test, which is absent here
    for dialect in DIALECTS:
        src = emit(ladder_model, dialect, "predict")
        fn = compile_source(src, dialect)
        with pytest.raises(MissingFeature):
            fn({"percent": "first_class"})


def test_tampered_source_is_rejected(ladder_model):
    src = emit(ladder_model, EmitDialect.PSEUDO_CODE, "predict")
    truncated = "\n".join(src.splitlines()[:-1])
    with pytest.raises(CorruptDocument):
        compile_source(truncated, EmitDialect.PSEUDO_CODE)
    mangled = src.replace("IF", "WHEN", 1)
    with pytest.raises(CorruptDocument):
        compile_source(mangled, EmitDialect.PSEUDO_CODE)
    c_src = emit(ladder_model, EmitDialect.C_STYLE, "predict")
    with pytest.raises(CorruptDocument):
        compile_source(c_src.replace("strcmp", "strcasecmp"),
                       EmitDialect.C_STYLE)


def test_random_trees_agree_across_all_dialects():
    for seed in range(30):
        rng = random.Random(seed)
        model = random_tree_model(rng)
        compiled = []
        for dialect in DIALECTS:
            src = emit(model, dialect, "decide")
            compiled.append(compile_source(src, dialect))
        for _ in range(40):
            record = random_record(rng, model.schema)
            expected = interpret(model, record)
            for fn in compiled:
                assert fn(record) == expected


def test_random_trees_emit_one_return_per_leaf():
    for seed in range(30):
        model = random_tree_model(random.Random(seed + 1000))
        src = emit(model, EmitDialect.PSEUDO_CODE, "decide")
        returns = [ln for ln in src.splitlines()
                   if ln.strip().startswith("RETURN ")]
        assert len(returns) == count_leaves(model.root)
