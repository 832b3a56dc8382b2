"""Prompt templates for the eight LLM subtasks.

Instruction and shot texts are kept verbatim, including the "foundeer" typo in
the first triplet example. Placeholders use ``{name}``; ``<K>`` inside the
instructions is filled from the ``k`` variable.
"""

from __future__ import annotations

import re
import string
from dataclasses import dataclass, field

TRIPLET = "triplet"
TEMPLATE = "template"
CLASSIFY = "classify"
ENTITY_SELECT = "entity-select"
RELATION_SELECT = "relation-select"
QUERY_SELECT = "query-select"
ANSWER_BOOLEAN = "answer-boolean"
ANSWER_FACT = "answer-fact"

TEMPLATE_IDS = (TRIPLET, TEMPLATE, CLASSIFY, ENTITY_SELECT, RELATION_SELECT, QUERY_SELECT,
                ANSWER_BOOLEAN, ANSWER_FACT)


class MissingVariableError(KeyError):
    def __init__(self, name: str, template_id: str):
        self.name = name
        super().__init__(f"prompt {template_id!r} needs variable {name!r}")


@dataclass(frozen=True)
class PromptTemplate:
    id: str
    instruction: str
    body: str
    shots: tuple[str, ...] = ()
    cot: str = ""
    shots_header: str = "Here are some examples:"

    @property
    def variables(self) -> list[str]:
        names = [f for _, f, _, _ in string.Formatter().parse(self.instruction + "\n" + self.body) if f]
        return list(dict.fromkeys(names))

    def render(self, variables: dict[str, object], n_shots: int | None = None) -> str:
        n = len(self.shots) if n_shots is None else n_shots
        if not 0 <= n <= len(self.shots):
            raise ValueError(f"n_shots must be within [0, {len(self.shots)}] for {self.id!r}")
        for name in self.variables:
            if name not in variables:
                raise MissingVariableError(name, self.id)
        values = {k: str(v) for k, v in variables.items()}
        parts = [self.instruction.format(**values)]
        if n:
            parts.append("\n".join([self.shots_header, *self.shots[:n]]))
        if self.cot:
            parts.append(self.cot)
        parts.append(self.body.format(**values))
        return "\n\n".join(parts)


TEMPLATES: dict[str, PromptTemplate] = {
    TRIPLET: PromptTemplate(
        id=TRIPLET,
        instruction=(
            "You are an assistant to identify triples within a provided sentence. "
            "Please adhere to the following guidelines:\n"
            "1. Triples should be structured in the format <entity1, relation, entity2>.\n"
            "2. The sentence must contain at least one triple, so you should provide at least one.\n"
            "3. Entities should represent the smallest semantic units and should not contain "
            "descriptive details.\n"
            "4. Entities can take the form of explicit or implicit references. Explicit entities "
            "refer to specific named resources, whereas implicit entities are less certain.\n"
            "5. When an entity is implicit, utilize a variable format such as '?variable' to "
            "denote it, for example, '?location' or '?person'."
        ),
        shots=(
            "Which city's founder is John Forbes? : <?city, foundeer, John Forbes>",
            "How many races have the horses bred by Jacques Van't Hart participated in? : "
            "<?horse, participated in, ?race> <?horse, breeder, Jacques Van't Hart>",
            "Is camel of the chordate phylum? : <camel, phylum, chordate>",
        ),
        body="Sentence: {question}\nOutput:",
    ),
    TEMPLATE: PromptTemplate(
        id=TEMPLATE,
        instruction=(
            "You are an assistant to generate a SPARQL query to address a specific question. "
            "Here are the guidelines to follow:\n"
            "1. Ensure that the resulting SPARQL query is designed to answer the provided question.\n"
            "2. Adhere to the commonly accepted SPARQL standards when generating the query.\n"
            "3. Make an effort to leverage the information provided to assist in the creation of "
            "the SPARQL query.\n"
            "4. Strive to keep the generated SPARQL query as straightforward as possible.\n"
            "5. Avoid including 'PREFIX' or ':' in the SPARQL query.\n"
            "6. Enclose condition entities and predicates within angle brackets, such as <entity> "
            "or <predicate>.\n"
            "7. Maintain the original order of the given triples without altering their sequence."
        ),
        body="Question: {question}\nTriplets: {triplets}\nOutput:",
    ),
    CLASSIFY: PromptTemplate(
        id=CLASSIFY,
        instruction=(
            "You are an assistant to determine the specific type of a given question according "
            "to the following guidelines:\n"
            "1. You must determine the most probable question type for the input question.\n"
            "2. The type of question should be enclosed within angle brackets, denoted as '<' and '>'.\n"
            "3. Possible question types include: <count>, <select>, and <yes or no>."
        ),
        body="Question: {question}\nOutput:",
    ),
    ENTITY_SELECT: PromptTemplate(
        id=ENTITY_SELECT,
        instruction=(
            "You are an assistant to select {k} URIs from a provided list of possible URIs for a "
            "specified entity, following these guidelines:\n"
            "1. Identify the {k} most appropriate URIs from the given list that best represent the "
            "entity in question.\n"
            "2. Seek to understand the semantic information associated with the specified entity "
            "by examining the provided question.\n"
            "3. The output should consist of {k} URIs chosen from the provided list of possible URIs.\n"
            "4. Simply output these {k} target URIs, each on a separate line, without providing any "
            "additional explanations."
        ),
        body="Sentence: {question}\nEntity: {mention}\nPossible entity URIs:\n{uris}\nOutput:",
    ),
    RELATION_SELECT: PromptTemplate(
        id=RELATION_SELECT,
        instruction=(
            "You are an assistant tasked with selecting the {k} relation URIs between entities "
            "mentioned in a sentence. Here are the guidelines:\n"
            "1. The two entities are listed one after the other, without a specific order.\n"
            "2. Use the provided sentence to discern the semantic meaning of these entities.\n"
            "3. The potential relation URIs are listed one by one.\n"
            "4. Your output should consist of a maximum of {k} possible relation URIs, although you "
            "may also output fewer if appropriate.\n"
            "5. Ensure that your output is organized, prioritizing the most likely relationship first.\n"
            "6. Provide a list of no more than {k} relation URIs (each on a separate line if there "
            "are multiple) without any additional descriptions."
        ),
        body="Sentence: {question}\nEntities: {entities}\nPossible relation URIs:\n{uris}\nOutput:",
    ),
    QUERY_SELECT: PromptTemplate(
        id=QUERY_SELECT,
        instruction=(
            "You are an assistant to select an appropriate SPARQL query from the provided list in "
            "order to respond to a specific question. Please adhere to the following guidelines:\n"
            "1. Select the most suitable SPARQL query from the given query list to address the question.\n"
            "2. Select a SPARQL query solely from the provided list; avoid crafting your own SPARQL query.\n"
            "3. The selected SPARQL query must be applicable to answer the given question."
        ),
        body="Sentence: {question}\nSPARQL candidates:\n{candidates}\nOutput:",
    ),
    ANSWER_BOOLEAN: PromptTemplate(
        id=ANSWER_BOOLEAN,
        instruction=(
            "You are an assistant to answer a yes-or-no question. Please adhere to the following "
            "guidelines:\n"
            "1. If you believe that the answer is yes, provide an output of 'True'. If not, provide "
            "an output of 'False'.\n"
            "2. Please do not include additional information or explanations in your response."
        ),
        body="Sentence: {question}\nOutput:",
    ),
    ANSWER_FACT: PromptTemplate(
        id=ANSWER_FACT,
        instruction=(
            "You are an assistant to answer a question. Please adhere to the following guidelines:\n"
            "1. The answer to the question is a single entity.\n"
            "2. You should just output the full expression of the answer without any punctuation.\n"
            "3. Do not output any other description."
        ),
        body="Sentence: {question}\nOutput:",
    ),
}


def get_template(template_id: str) -> PromptTemplate:
    try:
        return TEMPLATES[template_id]
    except KeyError:
        raise KeyError(f"unknown prompt template {template_id!r}") from None


def render_prompt(template: PromptTemplate | str, variables: dict[str, object],
                  n_shots: int | None = None) -> str:
    if isinstance(template, str):
        template = get_template(template)
    return template.render(variables, n_shots)


def normalize_whitespace(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()
