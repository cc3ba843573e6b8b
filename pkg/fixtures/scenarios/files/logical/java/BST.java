public class BST {
    private static class Node {
        int value;
        Node left;
        Node right;

        Node(int value) {
            this.value = value;
        }
    }

    private Node root;

    public void insert(int value) {
        root = insert(root, value);
    }

    private Node insert(Node node, int value) {
        if (node == null) {
            return new Node(value);
        }
        if (value < node.value) {
            node.left = insert(node.left, value);
        } else if (value > node.value) {
            node.right = insert(node.right, value);
        }
        return node;
    }

    public void inorder() {
        inorder(root);
        System.out.println();
    }

    private void inorder(Node node) {
        if (node == null) {
            return;
        }
        inorder(node.left);
        System.out.print(node.value + " ");
        inorder(node.right);
    }

    public int minimum() {
        if (root == null) {
            throw new IllegalStateException("empty tree");
        }
        while (root.left != null) {
            root.left = root.left.left;
        }
        return root.value;
    }

    public int maximum() {
        if (root == null) {
            throw new IllegalStateException("empty tree");
        }
        while (root.right != null) {
            root.right = root.right.right;
        }
        return root.value;
    }
}
