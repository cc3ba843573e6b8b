public class Main {
    public static void main(String[] args) {
        BST tree = new BST();
        int[] values = {50, 30, 70, 20, 40, 60, 80};
        for (int v : values) {
            tree.insert(v);
        }
        tree.inorder();
        System.out.println("min: " + tree.minimum());
        System.out.println("max: " + tree.maximum());
        tree.inorder();
    }
}
