class Node:
    def __init__(self, value):
        self.value = value
        self.left = None
        self.right = None


class BST:
    def __init__(self):
        self.root = None

    def insert(self, value):
        self.root = self._insert(self.root, value)

    def _insert(self, node, value):
        if node is None:
            return Node(value)
        if value < node.value:
            node.left = self._insert(node.left, value)
        elif value > node.value:
            node.right = self._insert(node.right, value)
        return node

    def inorder(self):
        out = []
        self._inorder(self.root, out)
        print(" ".join(str(v) for v in out))

    def _inorder(self, node, out):
        if node is None:
            return
        self._inorder(node.left, out)
        out.append(node.value)
        self._inorder(node.right, out)

    def minimum(self):
        if self.root is None:
            raise ValueError("empty tree")
        while self.root.left is not None:
            self.root.left = self.root.left.left
        return self.root.value

    def maximum(self):
        if self.root is None:
            raise ValueError("empty tree")
        while self.root.right is not None:
            self.root.right = self.root.right.right
        return self.root.value


if __name__ == "__main__":
    tree = BST()
    for v in (50, 30, 70, 20, 40, 60, 80):
        tree.insert(v)
    tree.inorder()
    print("min:", tree.minimum())
    print("max:", tree.maximum())
    tree.inorder()
