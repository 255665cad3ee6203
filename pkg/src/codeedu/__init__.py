"""CodeEdu: a multi-agent coding education platform.

Subpackages:
    llm         -- provider gateway, scripted mock, model bindings
    tools       -- tool registry, code sandbox, judge, crawler, file access
    agents      -- agent profiles and the tool-calling act loop
    planning    -- task decomposition, assignment, DAG scheduling
    session     -- tutoring session lifecycle and event log
    evaluation  -- simulated students, metrics, cross-validation, CLI
    api         -- HTTP facade over sessions
"""

__version__ = "0.1.0"
