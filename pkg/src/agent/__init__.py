# agent package: langgraph definition of the vanishing experiment
