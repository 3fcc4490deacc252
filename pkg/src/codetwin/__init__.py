"""codetwin: semantic code embeddings from a Siamese LSTM over
structure-based AST traversals, with a bag-of-tokens baseline and ROC/AUC
evaluation tooling."""

__version__ = "0.1.0"
