public class ArrayBinaryTree {
    private final int[] data;
    private int size;

    public ArrayBinaryTree(int capacity) {
        data = new int[capacity];
    }

    public void setRoot(int value) {
        data[0] = value;
        if (size == 0) {
            size = 1;
        }
    }

    public int left(int i) {
        return 2 * i + 1;
    }

    public int right(int i) {
        return 2 * i + 2;
    }

    public void setLeft(int i, int value) {
        int child = left(i);
        if (child <= data.length) {
            data[child] = value;
            if (child + 1 > size) {
                size = child + 1;
            }
        }
    }

    public void setRight(int i, int value) {
        int child = right(i);
        if (child <= data.length) {
            data[child] = value;
            if (child + 1 > size) {
                size = child + 1;
            }
        }
    }

    public int get(int i) {
        return data[i];
    }

    public int size() {
        return size;
    }
}
