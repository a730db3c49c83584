//! Quality-scoring prompt construction.

use crate::corpus::{language, CodeDocument};

/// The scoring prompt. `{LANGUAGE}` names the file's primary language and
/// `{CONTENT}` carries the file content; the same template is used for
/// ground-truth collection, scorer training, and inference.
pub const QUALITY_PROMPT_TEMPLATE: &str = "\
You are an expert of coding. Please carefully evaluate the quality of the {LANGUAGE} code file below based on the specific quality criteria essential for its potential use in pretraining a large language model.
Begin your assessment with a brief explanation that addresses the key factors listed below. Following your explanation, assign a numerical rating to the code file on a scale from 1 to 10, where 1 indicates the lowest quality and 10 indicates the highest quality. Please adhere strictly to the following format for your rating: \"Rating: [[X]]\", where X is your numerical rating. Note that the zero score policy should be firstly considered in your analysis, and skip the other criteria if the code meets any zero score conditions.
Criteria for Evaluation:
* Readability:
- Presence of a reasonable amount of comments.
- Inclusion of classes or functions, better with reasonable docstrings that describe the functionality.
- Neat and consistent formatting that adheres to common practice.
- Good naming conventions and well-structured code.
* Modularity:
- Avoidance of overly complicated / very long functions through modularization.
- Clear separation of logic and functionality, using classes and functions.
- Design of each module or component to perform a clear and coherent task.
* Clarity:
- Minimization of excessively repeated code and code blocks, such as repeatedly calling the same function for many times.
- Avoidance of massive commented-out code blocks.
- Avoidance of many random printing statements for debugging.
- Clear communication of intentions behind code blocks.
* Reusability:
- Absence of syntax or logical errors.
- Avoidance of embedding lots of hard-coded data directly within the code.
- Provision of complete and meaningful functionality, not overly simplistic.
- Design that facilitates easy reuse of functions or classes in other projects.
* Zero Score Policy:
- If the code is mostly configurations, such as very long json objects with many numbers or strings, rate 0 score.
- If the code is essentially a data file which includes lots of hard-coded data, such as too many lines of numbers or strings, rate 0 score.
- If the code has little to none effective logic, or is dominated by literals or assignments without any complexity, rate 0 score.
- If the code is auto-generated, with any comments like \"generated by Django\", rate 0 score.
After your analysis, provide your explanation for the aspects evaluated. Then, conclude with the rating in the specified format. For example, if you rate the code quality as 5 out of 10, you should write: \"Rating: [[5]]\".
{LANGUAGE} code to be assessed:
{CONTENT}.
";

/// Renders the template for a document. Unknown-language documents use the
/// literal tag `code`. Content is inserted verbatim after the language
/// substitutions, so placeholder-looking text inside the file is never
/// re-expanded.
pub fn build_quality_prompt(doc: &CodeDocument) -> String {
    let tag = if doc.language == language::UNKNOWN {
        "code"
    } else {
        doc.language.as_str()
    };
    render(QUALITY_PROMPT_TEMPLATE, tag, &doc.content)
}

fn render(template: &str, language_tag: &str, content: &str) -> String {
    let (head, tail) = template
        .split_once("{CONTENT}")
        .expect("template contains a {CONTENT} placeholder");
    let mut out = String::with_capacity(template.len() + content.len());
    out.push_str(&head.replace("{LANGUAGE}", language_tag));
    out.push_str(content);
    out.push_str(&tail.replace("{LANGUAGE}", language_tag));
    out
}
