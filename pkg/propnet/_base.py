class _Record:
    """Base class for the immutable domain records."""

    def __repr__(self) -> str:
        return "_Record()"

    def rep(self) -> str:
        """Shortcut for `__repr__()`."""
        return self.__repr__()

    def typename(self) -> str:
        """Shortcut for the name of the class type.

        :return: The name of the class type.
        :rtype: str

        :example:
            >>> import numpy as np
            >>> from propnet import PathLossMatrix
            ...
            >>> PathLossMatrix(values=np.zeros((2, 2))).typename()
            'PathLossMatrix'
        """
        return self.__class__.__name__
